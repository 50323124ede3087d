import {
  Envelope,
  ExecutionStep,
  GatewayError,
  InquiryPayload,
  PipelineTrace,
  PlanSummary,
  SessionEvent,
} from "./protocol";

// Everything the page shows, reduced from the ordered stream of user
// actions and server messages. The reducer is pure: replaying a
// recorded stream must reproduce the exact view (a test holds us to
// that), so no clocks, no randomness, no mutation of prior state.

export type ChatItem =
  | { role: "user"; text: string }
  | { role: "agent"; kind: "plans"; plans: PlanSummary[] }
  | { role: "agent"; kind: "executed"; plan: string; steps: ExecutionStep[] }
  | { role: "agent"; kind: "info"; text: string }
  | { role: "agent"; kind: "error"; text: string };

export type Modal =
  | { kind: "none" }
  | { kind: "inquiry"; inquiry: InquiryPayload }
  | { kind: "ambiguity"; plans: PlanSummary[] };

export type Connection = "connecting" | "online" | "reconnecting" | "lost";

export type ViewState = {
  session: string | null;
  connection: Connection;
  banner: string | null;
  history: ChatItem[];
  modal: Modal;
  trace: PipelineTrace | null;
};

export type UiAction =
  | { kind: "connected"; session: string }
  | { kind: "connection-lost"; reason: string }
  | { kind: "reconnecting"; attempt: number }
  | { kind: "utterance-sent"; text: string }
  | { kind: "server-event"; envelope: Envelope }
  | { kind: "server-error"; error: GatewayError }
  | { kind: "trace-loaded"; trace: PipelineTrace | null };

export const initialViewState: ViewState = {
  session: null,
  connection: "connecting",
  banner: null,
  history: [],
  modal: { kind: "none" },
  trace: null,
};

function planLine(plans: PlanSummary[]): string {
  return plans.length === 1 ? "1 plan ready" : `${plans.length} plans ready`;
}

// The modal mirrors the server's session state and nothing else: only
// inquiry/ambiguity events open it, and any terminal event closes it.
// A rejected answer re-arrives as a fresh inquiry event, so the form
// reopens with diagnostics without local bookkeeping.
function applyServerEvent(state: ViewState, envelope: Envelope): ViewState {
  const event = envelope.payload as unknown as SessionEvent;
  switch (event.type) {
    case "plans_ready":
      return {
        ...state,
        modal: { kind: "none" },
        history: [
          ...state.history,
          { role: "agent", kind: "plans", plans: event.plans },
        ],
      };
    case "ambiguity":
      return {
        ...state,
        modal: { kind: "ambiguity", plans: event.plans },
        history: [
          ...state.history,
          {
            role: "agent",
            kind: "info",
            text: `ambiguous: ${planLine(event.plans)}, pick one`,
          },
        ],
      };
    case "inquiry":
      return {
        ...state,
        modal: { kind: "inquiry", inquiry: event },
        history: [
          ...state.history,
          {
            role: "agent",
            kind: "info",
            text: event.diagnostics
              ? `answer not usable (${event.diagnostics}); asking again about '${event.argument}'`
              : `unknown argument: '${event.argument}'`,
          },
        ],
      };
    case "no_action":
      return {
        ...state,
        modal: { kind: "none" },
        history: [
          ...state.history,
          {
            role: "agent",
            kind: "info",
            text: "understood, but no action can be taken",
          },
        ],
      };
    case "parse_failed":
      return {
        ...state,
        modal: { kind: "none" },
        history: [
          ...state.history,
          { role: "agent", kind: "error", text: `cannot parse: ${event.reason}` },
        ],
      };
    case "executed":
      return {
        ...state,
        modal: { kind: "none" },
        history: [
          ...state.history,
          {
            role: "agent",
            kind: "executed",
            plan: event.plan,
            steps: event.steps,
          },
        ],
      };
    default:
      return {
        ...state,
        history: [
          ...state.history,
          {
            role: "agent",
            kind: "error",
            text: `unrecognized event: ${(event as { type: string }).type}`,
          },
        ],
      };
  }
}

export function applyAction(state: ViewState, action: UiAction): ViewState {
  switch (action.kind) {
    case "connected":
      return {
        ...state,
        session: action.session,
        connection: "online",
        banner: null,
      };
    case "connection-lost":
      return {
        ...state,
        connection: "lost",
        banner: `connection lost: ${action.reason}`,
        modal: { kind: "none" },
      };
    case "reconnecting":
      return {
        ...state,
        connection: "reconnecting",
        banner: `reconnecting (attempt ${action.attempt})...`,
      };
    case "utterance-sent":
      // a new utterance invalidates the previous trace as a whole;
      // the fresh one arrives only on request
      return {
        ...state,
        trace: null,
        history: [...state.history, { role: "user", text: action.text }],
      };
    case "server-event":
      return applyServerEvent(state, action.envelope);
    case "server-error":
      return {
        ...state,
        history: [
          ...state.history,
          {
            role: "agent",
            kind: "error",
            text: `${action.error.code}: ${action.error.message}`,
          },
        ],
      };
    case "trace-loaded":
      return { ...state, trace: action.trace };
  }
}

export function replay(actions: UiAction[]): ViewState {
  return actions.reduce(applyAction, initialViewState);
}
