"""Finite category theory and discrete causal inference, computed exhaustively."""
from .causal import (
    AlexandroffSpace,
    CausalDag,
    DagError,
    alexandroff_space,
    causal_presheaf,
    d_separated,
    intervene,
    intervention_category,
    is_backdoor_set,
    is_continuous,
    specialization_preorder,
)
from .fincat import (
    CategoryError,
    FinCategory,
    Functor,
    Morphism,
    Quiver,
    comma_category,
    free_category,
    full_subcategory,
    opposite,
    poset_category,
    terminal_category,
    validate_category,
)
from .kan import colimit_as_kan, confounder_approximation, kan_universality_check, left_kan, right_kan
from .limits import Limits, SizeGuardError
from .limits import limits as size_limits
from .scm import (
    Dataset,
    DiscreteScm,
    JointTable,
    adjustment_estimate,
    ate_exact,
    ci_check,
    do_distribution,
    ht_estimate,
    is_confounded,
    joint_distribution,
    sample,
)
from .setfun import (
    NatTransformation,
    SetFunctor,
    check_fully_faithful,
    enumerate_nats,
    presheaf_exponential,
    validate_functor,
)
from .universal import Diagram, colimit_of_set_diagram, limit_in_category, limit_of_set_diagram
from .yoneda import category_of_elements, crp_check, hom_presheaf, uct_decompose, yoneda_lemma_check

__version__ = "0.1.0"
