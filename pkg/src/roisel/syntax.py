"""Syntax element kinds, their entropy modes and binarizations."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum


class Kind(IntEnum):
    PRED_MODE = 0
    MPM_FLAG = 1
    MPM_IDX = 2
    LUMA_REM = 3
    CHROMA_IPM = 4
    MERGE_FLAG = 5
    MERGE_IDX = 6
    MVD_SIGN_H = 7
    MVD_SIGN_V = 8
    MVD_VAL_H = 9
    MVD_VAL_V = 10
    MVP_IDX = 11
    REF_IDX = 12
    CBF = 13
    LAST_POS = 14
    SIG = 15
    GT1 = 16
    GT2 = 17
    COEF_SIGN = 18
    COEF_REM = 19
    DQP_SIGN = 20
    DQP_VALUE = 21


N_KINDS = len(Kind)

# readable aliases used in reports and docs
KIND_NAMES = {
    Kind.PRED_MODE: "PredMode",
    Kind.MPM_FLAG: "LumaIPM_MPMFlag",
    Kind.MPM_IDX: "LumaIPM_MPMIdx",
    Kind.LUMA_REM: "LumaIPM_Rem",
    Kind.CHROMA_IPM: "ChromaIPM",
    Kind.MERGE_FLAG: "MergeFlag",
    Kind.MERGE_IDX: "MergeIdx",
    Kind.MVD_SIGN_H: "MVDSign_H",
    Kind.MVD_SIGN_V: "MVDSign_V",
    Kind.MVD_VAL_H: "MVDVal_H",
    Kind.MVD_VAL_V: "MVDVal_V",
    Kind.MVP_IDX: "MVPIdx",
    Kind.REF_IDX: "RefFrmIdx",
    Kind.CBF: "Cbf",
    Kind.LAST_POS: "LastPos",
    Kind.SIG: "CoefSigFlag",
    Kind.GT1: "CoefGt1",
    Kind.GT2: "CoefGt2",
    Kind.COEF_SIGN: "CoefSign",
    Kind.COEF_REM: "CoefRemaining",
    Kind.DQP_SIGN: "DQPSign",
    Kind.DQP_VALUE: "DQPValue",
}


class Mode(IntEnum):
    REGULAR = 0
    BYPASS = 1
    MIXED = 2  # regular prefix, bypass suffix


@dataclass(frozen=True)
class Coding:
    mode: Mode
    binarization: str  # "FL", "TR_k", "EG_k", "flag"


# How each kind is entropy coded in this codec.  Bins that the ciphers may
# touch are always in bypass mode at the basic level.
CODING = {
    Kind.PRED_MODE: Coding(Mode.REGULAR, "flag"),
    Kind.MPM_FLAG: Coding(Mode.REGULAR, "flag"),
    Kind.MPM_IDX: Coding(Mode.REGULAR, "TR_k"),
    Kind.LUMA_REM: Coding(Mode.REGULAR, "FL"),
    Kind.CHROMA_IPM: Coding(Mode.REGULAR, "TR_k"),
    Kind.MERGE_FLAG: Coding(Mode.REGULAR, "flag"),
    Kind.MERGE_IDX: Coding(Mode.BYPASS, "FL"),
    Kind.MVD_SIGN_H: Coding(Mode.BYPASS, "FL"),
    Kind.MVD_SIGN_V: Coding(Mode.BYPASS, "FL"),
    Kind.MVD_VAL_H: Coding(Mode.MIXED, "EG_k"),
    Kind.MVD_VAL_V: Coding(Mode.MIXED, "EG_k"),
    Kind.MVP_IDX: Coding(Mode.REGULAR, "FL"),
    Kind.REF_IDX: Coding(Mode.MIXED, "EG_k"),
    Kind.CBF: Coding(Mode.REGULAR, "flag"),
    Kind.LAST_POS: Coding(Mode.REGULAR, "TR_k"),
    Kind.SIG: Coding(Mode.REGULAR, "flag"),
    Kind.GT1: Coding(Mode.REGULAR, "flag"),
    Kind.GT2: Coding(Mode.REGULAR, "flag"),
    Kind.COEF_SIGN: Coding(Mode.BYPASS, "FL"),
    Kind.COEF_REM: Coding(Mode.BYPASS, "TR_k"),
    Kind.DQP_SIGN: Coding(Mode.BYPASS, "FL"),
    Kind.DQP_VALUE: Coding(Mode.MIXED, "EG_k"),
}


@dataclass(frozen=True)
class SyntaxElement:
    """One coded element.

    ``value`` is the element's semantic value: a bit for flags and signs, the
    magnitude for MVD values, the signed delta for DQP values, the remaining
    level for coefficients.  ``k`` carries the Rice parameter of
    ``COEF_REM``; it is ignored otherwise.
    """

    kind: Kind
    value: int
    k: int = 0

    def with_value(self, value: int) -> "SyntaxElement":
        return SyntaxElement(self.kind, value, self.k)
