"""Igusa class polynomials of quartic CM fields via genus-2 theta constants."""

from .classgroup import IdealClass, class_group
from .classpoly import ClassPolynomialSet, assemble, discriminant_data, reconstruct
from .cmfield import CMField, CMType, GaloisType, cm_types, cmfield_from_quartic
from .denomcheck import DenominatorReport, denominator_report, property1_holds
from .invariants import igusa_from_theta, modular_values
from .numeric import PrecisionContext
from .periods import period_matrix, polarizations, siegel_reduce
from .pipeline import FieldSpec, RunConfig, run_pipeline
from .theta import theta_vector

__all__ = [
    "CMField",
    "CMType",
    "ClassPolynomialSet",
    "DenominatorReport",
    "FieldSpec",
    "GaloisType",
    "IdealClass",
    "PrecisionContext",
    "RunConfig",
    "assemble",
    "class_group",
    "cm_types",
    "cmfield_from_quartic",
    "denominator_report",
    "discriminant_data",
    "igusa_from_theta",
    "modular_values",
    "period_matrix",
    "polarizations",
    "property1_holds",
    "reconstruct",
    "run_pipeline",
    "siegel_reduce",
    "theta_vector",
]
__version__ = "0.1.0"
