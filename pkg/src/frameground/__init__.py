"""Frame interpretation engine for imperative dialogue.

Parses commands like "Jacob find the blue ball", grounds every
constituent against an ontology/lexicon memory, validates candidate
meanings against execution-strategy restrictions, and emits executable
plans — suspending into dialogue whenever a word has no known sense.
"""

from .competency import (
    CompetencyEnvironment,
    CompetencyUnavailable,
    ExecutionTrace,
    Plan,
    PlanStep,
    UnboundRole,
    ValidationResult,
    execute_plan,
    instantiate,
    strategies_for,
    valid,
)
from .interpreter import (
    AnnotatedTree,
    AnswerUnresolvable,
    Complete,
    DefinitionAnswer,
    HandleAlreadyUsed,
    InquiryAborted,
    InterpretOutcome,
    MeaningTree,
    PendingInquiry,
    PipelineTrace,
    ResumptionHandle,
    SenseAnswer,
    Suspended,
    combinations,
    complete,
    interpret,
    meanings,
    resume,
    select_frame,
    sound,
)
from .kbio import (
    CycleDetected,
    DuplicateId,
    Finding,
    InvariantViolation,
    KBError,
    MalformedRecord,
    UnresolvedReference,
    load_knowledge_base,
    save_knowledge_base,
    validate_knowledge_base,
    write_knowledge_base,
)
from .memory import (
    ConstituentUnknown,
    MemoryStore,
    MutationHandle,
    UnknownRelationTarget,
    UnknownType,
)
from .model import (
    CompetencyAction,
    CompetencyDescriptor,
    CompoundSenseCandidate,
    ConceptDefinition,
    ExecutionStrategy,
    Frame,
    FrameSet,
    OLayer,
    OLNode,
    ORelation,
    PartOfSpeech,
    Restriction,
    RestrictionKind,
    Sense,
    SenseRelation,
    SenseRelationKind,
    StrategyAssociation,
    TemplateStep,
)
from .parsing import (
    Category,
    Constituent,
    NoVerbFound,
    ParseError,
    UnrecognizedShape,
    UtteranceTree,
    args_of,
    parse_utterance,
    verb_of,
)
from .session import (
    AmbiguityDetected,
    IndexOutOfRange,
    InquiryRequested,
    NoActionPossible,
    NoPendingChoice,
    NoPendingInquiry,
    ParseFailed,
    PlanExecuted,
    PlanSummary,
    PlansReady,
    Policy,
    Session,
    SessionBusy,
    SessionState,
    answer_inquiry,
    choose_plan,
    close_session,
    event_to_dict,
    open_session,
    submit_utterance,
)

__version__ = "0.1.0"
