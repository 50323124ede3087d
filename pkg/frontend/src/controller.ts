import { GatewayClient } from "./client";
import { Envelope, InquiryAnswer, PipelineTrace } from "./protocol";
import { ViewState, UiAction, applyAction, initialViewState } from "./state";
import { TransportFactory } from "./transport";

export type AppOptions = {
  transportFactory: TransportFactory;
  policy?: "ask_user" | "auto_first";
  language?: string;
  noExec?: boolean;
  replyTimeoutMs?: number;
  // reconnect-on-loss; attempts=0 disables (tests mostly disable it)
  reconnectDelayMs?: number;
  reconnectAttempts?: number;
};

export class ModalPendingError extends Error {
  constructor() {
    super("answer the open dialog first");
  }
}

export class NotConnectedError extends Error {
  constructor() {
    super("not connected to the gateway");
  }
}

// Glue between the gateway client and the view state. All user-facing
// operations funnel through here so the "no new wire traffic while a
// modal is unanswered" rule has a single enforcement point; trace
// queries are the deliberate exception. Sessions do not survive the
// connection, so a reconnect opens a fresh one and the sequence
// numbering restarts with it — that is the whole resync story.
export class App {
  private currentState: ViewState = initialViewState;
  private listeners = new Set<(state: ViewState) => void>();
  private client: GatewayClient | null = null;
  private sessionId: string | null = null;
  private record: Envelope[] = [];
  private shuttingDown = false;

  private constructor(private readonly options: AppOptions) {}

  static async start(options: AppOptions): Promise<App> {
    const app = new App(options);
    await app.connect();
    return app;
  }

  private dispatch(action: UiAction): void {
    this.currentState = applyAction(this.currentState, action);
    for (const listener of this.listeners) listener(this.currentState);
  }

  private async connect(): Promise<void> {
    this.client = await GatewayClient.connect(
      this.options.transportFactory,
      {
        onEvent: (envelope) => {
          this.record.push(envelope);
          this.dispatch({ kind: "server-event", envelope });
        },
        onError: (error) => this.dispatch({ kind: "server-error", error }),
        onClose: (reason) => this.handleLoss(reason),
      },
      { replyTimeoutMs: this.options.replyTimeoutMs },
    );
    const info = await this.client.openSession({
      policy: this.options.policy,
      language: this.options.language,
      no_exec: this.options.noExec,
    });
    this.sessionId = info.id;
    this.dispatch({ kind: "connected", session: info.id });
  }

  private handleLoss(reason: string): void {
    if (this.shuttingDown) return;
    this.sessionId = null;
    this.dispatch({ kind: "connection-lost", reason });
    void this.reconnect();
  }

  private async reconnect(): Promise<void> {
    const attempts = this.options.reconnectAttempts ?? 0;
    const delay = this.options.reconnectDelayMs ?? 1000;
    for (let attempt = 1; attempt <= attempts && !this.shuttingDown; attempt++) {
      this.dispatch({ kind: "reconnecting", attempt });
      await new Promise((resolve) => setTimeout(resolve, delay));
      try {
        await this.connect();
        return;
      } catch {
        // gateway still unreachable; fall through to the next attempt
      }
    }
    if (!this.shuttingDown && attempts > 0) {
      this.dispatch({ kind: "connection-lost", reason: "gave up reconnecting" });
    }
  }

  state(): ViewState {
    return this.currentState;
  }

  onChange(listener: (state: ViewState) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private requireSession(): { client: GatewayClient; session: string } {
    if (this.client === null || this.client.isClosed || this.sessionId === null) {
      throw new NotConnectedError();
    }
    return { client: this.client, session: this.sessionId };
  }

  sendUtterance(text: string): void {
    if (this.currentState.modal.kind !== "none") throw new ModalPendingError();
    const { client, session } = this.requireSession();
    this.dispatch({ kind: "utterance-sent", text });
    client.submitUtterance(session, text);
  }

  answerInquiry(answer: InquiryAnswer): void {
    if (this.currentState.modal.kind !== "inquiry") {
      throw new Error("no inquiry is open");
    }
    const { client, session } = this.requireSession();
    client.answerInquiry(session, answer);
  }

  choosePlan(index: number): void {
    if (this.currentState.modal.kind !== "ambiguity") {
      throw new Error("no choice is open");
    }
    const { client, session } = this.requireSession();
    client.choosePlan(session, index);
  }

  // allowed even while a modal is open: reading the trace sends no
  // session-mutating traffic
  async refreshTrace(): Promise<PipelineTrace | null> {
    const { client, session } = this.requireSession();
    const trace = await client.requestTrace(session);
    this.dispatch({ kind: "trace-loaded", trace });
    return trace;
  }

  // incoming event.* envelopes across all connections, in order;
  // the raw material for diffing a live drive against a batch log
  recordedEvents(): Envelope[] {
    return [...this.record];
  }

  close(): void {
    this.shuttingDown = true;
    this.client?.close();
  }
}
