"""Moulin exact-repair regenerating codes over prime fields.

The public surface re-exported here covers the common path: pick
parameters, build an instance, encode, hand out shares, download and
repair.  The submodules hold the rest.
"""

from .code_params import CodeParams, closed_form_params, layered_params, ogf_params
from .errors import (
    DownloadError,
    FieldTooSmallError,
    MoulinError,
    NoSolutionError,
    ParameterError,
    RepairError,
)
from .finite_field import PrimeField, StarConfig, check_sd_sk, make_layered_stars, make_vandermonde_stars
from .moulin_code import (
    CodeInstance,
    HelpMessage,
    NodeContent,
    build_instance,
    complement_chain,
    download,
    encode,
    extract_node,
    help_message,
    help_space_rank,
    recover_message,
    repair,
)

__all__ = [
    "CodeInstance", "CodeParams", "DownloadError", "FieldTooSmallError", "HelpMessage",
    "MoulinError", "NoSolutionError", "NodeContent", "ParameterError", "PrimeField",
    "RepairError", "StarConfig", "build_instance", "check_sd_sk", "closed_form_params",
    "complement_chain", "download", "encode", "extract_node", "help_message",
    "help_space_rank", "layered_params", "make_layered_stars", "make_vandermonde_stars",
    "ogf_params", "recover_message", "repair",
]
