from .aggregation import aggregate_global, aggregate_partial, fedavg, weighted_average
from .data import (
    DataShard,
    Dataset,
    load_idx_dataset,
    partition_data,
    pooled,
    read_idx,
    synthetic_blobs,
    train_test_split,
    write_idx,
)
from .objective import SOFTMAX, SoftmaxRegression
from .training import (
    DivergenceError,
    ModelState,
    TrainingConfig,
    evaluate,
    global_loss,
    local_loss,
    local_train,
    num_minibatches,
    training_time,
)

__all__ = [
    "DataShard", "Dataset", "DivergenceError", "ModelState", "SOFTMAX", "SoftmaxRegression",
    "TrainingConfig", "aggregate_global", "aggregate_partial", "evaluate", "fedavg",
    "global_loss", "load_idx_dataset", "local_loss", "local_train", "num_minibatches",
    "partition_data", "pooled", "read_idx", "synthetic_blobs", "train_test_split",
    "training_time", "weighted_average", "write_idx",
]
