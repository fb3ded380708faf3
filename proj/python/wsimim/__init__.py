# Copyright 2026 The wsimim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Word sense induction: MIM sense embeddings, clustering, polysemy, metrics."""

from wsimim._core import (
    InstanceMismatch,
    MimConfig,
    MimModel,
    VectorPairSet,
    agglomerative,
    centroids,
    clusters_from_score,
    embed,
    fuzzy_bcubed,
    fuzzy_nmi,
    geometric_avg,
    grade,
    iic_loss,
    load_model,
    match_loss,
    paired_f_score,
    polysemy_score,
    read_dump,
    run_pipeline,
    train_mim,
    v_measure,
    write_benchmark,
)

__all__ = [name for name in dir() if not name.startswith("_")]
