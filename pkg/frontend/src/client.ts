import {
  Envelope,
  GatewayError,
  InquiryAnswer,
  PipelineTrace,
  encode,
  isEventType,
  parseEnvelope,
} from "./protocol";
import { LineTransport, TransportFactory, TransportHandlers } from "./transport";

export type SessionInfo = {
  id: string;
  language: string;
  policy: string;
  kb: string;
};

export type ConceptRow = {
  id: string;
  type: string | null;
  label: string | null;
  compound_of: string[];
  relations: string[][];
};

export type ClientHandlers = {
  onEvent: (envelope: Envelope) => void;
  onError: (error: GatewayError) => void;
  onClose: (reason: string) => void;
};

type PendingReply = {
  types: Set<string>;
  resolve: (envelope: Envelope) => void;
  reject: (error: Error) => void;
  timer: ReturnType<typeof setTimeout>;
};

export class GatewayRejection extends Error {
  constructor(public readonly code: string, message: string) {
    super(`${code}: ${message}`);
  }
}

// One connection to the gateway. Tracks the per-session sequence
// counters (the null session shares a single counter, like any other),
// correlates request/reply pairs, dispatches event pushes, and records
// every incoming event so a drive can be diffed against a batch log.
//
// Correlation leans on the server processing each connection's
// messages strictly in order: replies arrive in request order, so a
// FIFO of expected reply types suffices. An `error` envelope settles
// the oldest pending request if one exists and is surfaced through
// onError otherwise (submit-class messages expect no reply, so their
// failures land there).
export class GatewayClient {
  private seqCounters = new Map<string | null, number>();
  private pending: PendingReply[] = [];
  private recorded: Envelope[] = [];
  private closed = false;

  private constructor(
    private readonly transport: LineTransport,
    private readonly handlers: ClientHandlers,
    private readonly replyTimeoutMs: number,
  ) {}

  static async connect(
    factory: TransportFactory,
    handlers: ClientHandlers,
    options: { replyTimeoutMs?: number } = {},
  ): Promise<GatewayClient> {
    let client: GatewayClient | null = null;
    const transportHandlers: TransportHandlers = {
      onLine: (line) => client?.handleLine(line),
      onClose: (reason) => client?.handleClose(reason),
    };
    const transport = await factory(transportHandlers);
    client = new GatewayClient(
      transport,
      handlers,
      options.replyTimeoutMs ?? 5000,
    );
    return client;
  }

  private nextSeq(session: string | null): number {
    const next = (this.seqCounters.get(session) ?? 0) + 1;
    this.seqCounters.set(session, next);
    return next;
  }

  private send(type: string, session: string | null, payload: Record<string, unknown>): void {
    if (this.closed) throw new Error("connection is closed");
    this.transport.send(
      encode({ type, session, seq: this.nextSeq(session), payload }),
    );
  }

  private request(
    type: string,
    session: string | null,
    payload: Record<string, unknown>,
    replyTypes: string[],
  ): Promise<Envelope> {
    return new Promise((resolve, reject) => {
      const entry: PendingReply = {
        types: new Set(replyTypes),
        resolve,
        reject,
        timer: setTimeout(() => {
          const at = this.pending.indexOf(entry);
          if (at >= 0) this.pending.splice(at, 1);
          reject(new Error(`no reply to ${type} within ${this.replyTimeoutMs}ms`));
        }, this.replyTimeoutMs),
      };
      this.pending.push(entry);
      try {
        this.send(type, session, payload);
      } catch (err) {
        clearTimeout(entry.timer);
        this.pending.splice(this.pending.indexOf(entry), 1);
        reject(err as Error);
      }
    });
  }

  private handleLine(line: string): void {
    let envelope: Envelope;
    try {
      envelope = parseEnvelope(line);
    } catch (err) {
      this.handlers.onError({ code: "client-decode", message: String(err) });
      return;
    }

    if (isEventType(envelope.type)) {
      this.recorded.push(envelope);
      this.handlers.onEvent(envelope);
      return;
    }
    if (envelope.type === "ping") {
      // server heartbeat; answer on the same (null) session
      try {
        this.send("pong", envelope.session, envelope.payload);
      } catch {
        // closing; the server does not enforce pongs
      }
      return;
    }

    const head = this.pending[0];
    if (head && head.types.has(envelope.type)) {
      this.pending.shift();
      clearTimeout(head.timer);
      head.resolve(envelope);
      return;
    }
    if (envelope.type === "error") {
      const payload = envelope.payload as GatewayError;
      if (head) {
        this.pending.shift();
        clearTimeout(head.timer);
        head.reject(new GatewayRejection(payload.code, payload.message));
      } else {
        this.handlers.onError(payload);
      }
      return;
    }
    this.handlers.onError({
      code: "client-unexpected",
      message: `unexpected message type ${envelope.type}`,
    });
  }

  private handleClose(reason: string): void {
    if (this.closed) return;
    this.closed = true;
    for (const entry of this.pending.splice(0)) {
      clearTimeout(entry.timer);
      entry.reject(new Error(`connection closed: ${reason}`));
    }
    this.handlers.onClose(reason);
  }

  async openSession(
    options: { policy?: string; language?: string; no_exec?: boolean } = {},
  ): Promise<SessionInfo> {
    const reply = await this.request("session.open", null, options, [
      "session.opened",
    ]);
    return reply.payload as SessionInfo;
  }

  submitUtterance(session: string, text: string): void {
    this.send("utterance.submit", session, { text });
  }

  answerInquiry(session: string, answer: InquiryAnswer): void {
    this.send("inquiry.answer", session, answer);
  }

  choosePlan(session: string, index: number): void {
    this.send("ambiguity.choose", session, { index });
  }

  async requestTrace(session: string): Promise<PipelineTrace | null> {
    const reply = await this.request("pipeline.trace", session, {}, [
      "pipeline.trace.reply",
    ]);
    return reply.payload.trace as PipelineTrace | null;
  }

  async listConcepts(session: string): Promise<ConceptRow[]> {
    const reply = await this.request("kb.concepts", session, {}, [
      "kb.concepts.reply",
    ]);
    return reply.payload.concepts as ConceptRow[];
  }

  async ping(payload: Record<string, unknown> = {}): Promise<Record<string, unknown>> {
    const reply = await this.request("ping", null, payload, ["pong"]);
    return reply.payload;
  }

  // Every `event.*` envelope received so far, in arrival order.
  recordedEvents(): Envelope[] {
    return [...this.recorded];
  }

  get isClosed(): boolean {
    return this.closed;
  }

  close(): void {
    if (this.closed) return;
    this.transport.close();
    this.handleClose("closed by client");
  }
}
