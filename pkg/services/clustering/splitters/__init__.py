# Splitters Package
from typing import Dict, Type, Union

from .base import Splitter, UniformClusterError
from .otsu import OtsuSplitter, split_otsu
from .balanced import BalancedSplitter, split_balanced
from .merge import MergeSplitter, MergeStep, merge_sequence, split_merge

SPLITTERS: Dict[str, Type[Splitter]] = {
    "otsu": OtsuSplitter,
    "balanced": BalancedSplitter,
    "merge": MergeSplitter,
}


def get_splitter(splitter: Union[str, Splitter]) -> Splitter:
    if isinstance(splitter, Splitter):
        return splitter
    try:
        return SPLITTERS[splitter]()
    except KeyError:
        raise ValueError(f"unknown splitter '{splitter}', expected one of {sorted(SPLITTERS)}") from None
