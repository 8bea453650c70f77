"""Finite-model workbench for non-contingency logic over neighborhood and
Kripke structures: evaluation under three semantics, model transformations,
bisimulation notions with greatest-fixpoint bisimilarity, frame definability
sweeps, and Hilbert-style proof checking with bounded soundness audits."""

from .formula import (Atom, And, Bot, Box, Delta, Formula, Iff, Imp, Metrics,
                      Nabla, Not, Or, ParseError, Top, expand_sugar, metrics,
                      parse)
from .model import (FRAME_CLASSES, MODEL_CLASSES, BudgetError, FrameProperty,
                    KripkeModel, NeighborhoodModel, classify, frame_class,
                    has_property, validate)
from .semantics import (FrameCheck, SemanticsKind, evaluate, extension,
                        frame_valid)
from .transform import c_variation, qf_to_kripke, qf_variation
from .bisim import (BisimKind, BisimVerdict, PairRelation, Partition,
                    char_formula, check_bisim, is_coherent,
                    logical_equiv_partition, max_bisim)
from .definability import (Counterexample, DefinabilityClaim, DefinesResult,
                           builtin_claim, builtin_table, check_frame, defines)
from .proofsys import (SCHEMAS, AuditReport, AxiomSystem, ProofLine,
                       ProofVerdict, audit_soundness, check_proof,
                       countermodel_search, filter_equ_witness,
                       is_taut_instance, match_schema, schema_instance)
from .generators import (GenerationError, GenSpec, enum_frames,
                         enum_kripke_frames, frame_at, random_formula,
                         random_kripke, random_model)

__version__ = "0.1.0"
