"""Commuting matrix tuples as matrix factorizations, with exact checks."""

from .classical import (BimatrixModule, drozd_certify, drozd_embed, gp_certify, gp_embed,
                        module_hom_basis, module_isomorphism_verdict)
from .decomp import A1Decomposition, decompose
from .errors import (ArityMismatchError, CertificationError, ConfigurationError, DistinctnessError,
                     EmptyInputError, FieldTooSmallError, InvalidHomError, NonCommutingError,
                     OrderTooLowError, ParseError, PreconditionError, TruncationError,
                     VariableClashError, WildMFError)
from .fields import QQ, PrimeField, Rationals, parse_field
from .homs import (HomBasis, Policy, Verdict, certify_constant_diagonal, certify_dagger_basis,
                   certify_hom_basis, certify_lower_triangular, dagger_basis, is_indecomposable,
                   is_isomorphic_tuples, mf_hom_basis_mod, mf_isomorphism_verdict, tuple_hom_basis)
from .inflation import (CommutingTuple, EmbeddingFunctor, TupleHom, check_functoriality,
                        functor_morphism, functor_object)
from .matfac import (MatrixFactorization, MFHom, a1_chain, knorrer_double, knorrer_double_hom,
                     param_factorization, verify_factorization)
from .series import ParamPoly, Series, SeriesRing
from .smatrix import SeriesMatrix

__all__ = [name for name in dir() if not name.startswith("_")]
