// Wire format for the dialogue gateway: newline-delimited JSON
// envelopes over a byte stream. Everything here is shape-only; no
// transport, no state.

export type Envelope = {
  type: string;
  session: string | null;
  seq: number;
  payload: Record<string, unknown>;
};

export type RoleBinding = { node: string; label: string };

export type PlanSummary = {
  plan: string;
  strategy: string;
  name: string;
  bindings: Record<string, RoleBinding>;
};

export type SenseCandidate = { id: string; lemma: string; gloss: string };

export type InquiryPayload = {
  type: "inquiry";
  argument: string;
  language: string;
  candidates: SenseCandidate[];
  diagnostics?: string;
};

export type ExecutionStep = {
  competency: string;
  action: string;
  bindings: Record<string, string>;
  result: string;
};

export type SessionEvent =
  | { type: "plans_ready"; plans: PlanSummary[] }
  | { type: "ambiguity"; plans: PlanSummary[] }
  | InquiryPayload
  | { type: "no_action" }
  | { type: "parse_failed"; reason: string }
  | { type: "executed"; plan: string; steps: ExecutionStep[] };

export type Funnel = {
  raw_pairs: number;
  combinations: number;
  meanings: number;
  plans: number;
};

export type ArgumentTrace = {
  text: string;
  raw_pairs: number;
  resolved: number;
  inquiries: number;
};

export type ValidationTrace = {
  frameset: string;
  meaning: number;
  strategy: string;
  name: string;
  valid: boolean;
  failed: {
    kind: string;
    role: string;
    target: string;
    reason: string;
  } | null;
};

export type PipelineTrace = {
  utterance: string;
  language: string;
  verb: string | null;
  arguments: ArgumentTrace[];
  framesets: { id: string; frame: string | null; sound: boolean; meanings: number }[];
  funnel: Funnel;
  suspensions: number;
  validations: ValidationTrace[];
};

export type GatewayError = { code: string; message: string };

// New-concept definition submitted through the inquiry form. Relations
// are [kind, target] pairs; an optional third element carries a value.
export type Definition = {
  lemma: string;
  type: string;
  relations: string[][];
  language?: string;
  part_of_speech?: string;
  gloss?: string;
};

export type InquiryAnswer = { sense: string } | { definition: Definition };

export function encode(envelope: Envelope): string {
  return JSON.stringify(envelope) + "\n";
}

export function isEventType(type: string): boolean {
  return type.startsWith("event.");
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

export function parseEnvelope(line: string): Envelope {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    throw new Error(`not JSON: ${line.slice(0, 120)}`);
  }
  if (!isRecord(raw) || typeof raw.type !== "string") {
    throw new Error("envelope must be an object with a string 'type'");
  }
  if (raw.session !== null && typeof raw.session !== "string") {
    throw new Error("'session' must be a string or null");
  }
  if (typeof raw.seq !== "number" || !Number.isInteger(raw.seq)) {
    throw new Error("'seq' must be an integer");
  }
  if (!isRecord(raw.payload)) {
    throw new Error("'payload' must be an object");
  }
  return {
    type: raw.type,
    session: raw.session,
    seq: raw.seq,
    payload: raw.payload,
  };
}

// Reassembles envelopes from arbitrary byte-chunk boundaries. Feed it
// whatever the socket hands over; it emits one envelope per complete
// line and buffers the remainder.
export class LineDecoder {
  private buffer = "";

  push(chunk: string): Envelope[] {
    this.buffer += chunk;
    const out: Envelope[] = [];
    for (;;) {
      const nl = this.buffer.indexOf("\n");
      if (nl < 0) break;
      const line = this.buffer.slice(0, nl).trim();
      this.buffer = this.buffer.slice(nl + 1);
      if (line.length === 0) continue;
      out.push(parseEnvelope(line));
    }
    return out;
  }

  get pending(): boolean {
    return this.buffer.length > 0;
  }
}

// The canonical serialization the engine uses for its event log:
// sorted keys, no spaces. Recorded UI streams are diffed against batch
// logs in this form, so key order must never leak into comparisons.
export function canonicalJson(value: unknown): string {
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalJson).join(",") + "]";
  }
  if (typeof value === "object" && value !== null) {
    const entries = Object.keys(value as Record<string, unknown>)
      .sort()
      .map(
        (key) =>
          JSON.stringify(key) +
          ":" +
          canonicalJson((value as Record<string, unknown>)[key]),
      );
    return "{" + entries.join(",") + "}";
  }
  return JSON.stringify(value);
}
