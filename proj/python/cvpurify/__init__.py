# Copyright 2026 The cvpurify Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Python access to the cvpurify library."""

from cvpurify._core import (
    ConfigError,
    QndParams,
    __version__,
    degeneracy,
    experiments,
    increase_threshold,
    initial_entanglement,
    log2_degeneracy,
    outcome_entanglement,
    outcome_probability,
    qnd_budget,
    run_experiment,
    transfer_efficiency,
)

__all__ = [
    "ConfigError",
    "QndParams",
    "__version__",
    "degeneracy",
    "experiments",
    "increase_threshold",
    "initial_entanglement",
    "log2_degeneracy",
    "outcome_entanglement",
    "outcome_probability",
    "qnd_budget",
    "run_experiment",
    "transfer_efficiency",
]
