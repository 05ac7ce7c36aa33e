"""End-to-end evaluation platform for interactive machine translation."""

from .align import CorrectnessMarking, char_script, levenshtein, mark_correct, merge_spans, mtpe_cost
from .backends import (
    Backend,
    BackendError,
    LLMBackend,
    NoisyOracleBackend,
    OracleBackend,
    PrefixOracleBackend,
    TranslationRequest,
    TranslationResponse,
    WireBackend,
)
from .corpus import ParallelCorpus, load_corpus, read_logs, sample_corpus, write_logs
from .edits import (
    EditBatch,
    EditKind,
    EditOp,
    TaggedText,
    batch_cost,
    blank_fill,
    cost_of_tags,
    delete,
    insert,
    keep,
    normalize,
    op_cost,
    replace,
    to_tagged,
)
from .metrics import CampaignReport, SessionMetrics, aggregate, session_metrics
from .policies import PolicyKind, PolicyState, new_state, on_violation, step, tolerance
from .session import SessionConfig, SessionLog, TurnRecord, run_session, turn_limit
from .template import (
    BLANK,
    Blank,
    Constraint,
    LexicalTemplate,
    MatchResult,
    build_template,
    matches,
    to_prompt_string,
)
from .text import Sentence, WordSegmentation, char_span_of, tokenize

__version__ = "0.1.0"
