from .base import BspJob, CostDescriptor, MrJob
from .bfs import BfsBsp, BfsMr, bfs_bsp, bfs_mr
from .matmul import MatmulBsp, MatmulMr, matmul_bsp, matmul_mr
from .psrs import PsrsBsp, PsrsMr, psrs_bsp, psrs_mr, regular_samples
from .wordcount import WordCount, wordcount

__all__ = [
    "BspJob",
    "CostDescriptor",
    "MrJob",
    "BfsBsp",
    "BfsMr",
    "bfs_bsp",
    "bfs_mr",
    "MatmulBsp",
    "MatmulMr",
    "matmul_bsp",
    "matmul_mr",
    "PsrsBsp",
    "PsrsMr",
    "psrs_bsp",
    "psrs_mr",
    "regular_samples",
    "WordCount",
    "wordcount",
]
