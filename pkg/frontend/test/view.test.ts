import { describe, expect, it } from "vitest";

import { PipelineTrace } from "../src/protocol";
import { applyAction, initialViewState } from "../src/state";
import {
  escapeHtml,
  parseRelationLines,
  renderApp,
  renderTrace,
} from "../src/view";

const trace: PipelineTrace = {
  utterance: "Jacob find the blue ball",
  language: "en",
  verb: "find",
  arguments: [
    { text: "Jacob", raw_pairs: 1, resolved: 1, inquiries: 0 },
    { text: "the blue ball", raw_pairs: 96, resolved: 1, inquiries: 0 },
  ],
  framesets: [{ id: "fs:en:find", frame: "f:np-v-np", sound: true, meanings: 1 }],
  funnel: { raw_pairs: 96, combinations: 1, meanings: 1, plans: 1 },
  suspensions: 0,
  validations: [
    {
      frameset: "fs:en:find",
      meaning: 0,
      strategy: "es:person-search",
      name: "locate person",
      valid: false,
      failed: {
        kind: "is_a",
        role: "Theme",
        target: "n:person",
        reason: "'blue ball' is not a 'person'",
      },
    },
    {
      frameset: "fs:en:find",
      meaning: 0,
      strategy: "es:colored-ball-search",
      name: "search colored objects",
      valid: true,
      failed: null,
    },
  ],
};

function countFrom(html: string, stage: string): number {
  const match = html.match(
    new RegExp(`data-stage="${stage}">(\\d+)<`),
  );
  if (!match) throw new Error(`stage ${stage} not rendered`);
  return Number(match[1]);
}

describe("trace inspector", () => {
  it("renders every funnel stage with its count", () => {
    const html = renderTrace(trace);
    expect(countFrom(html, "raw_pairs")).toBe(96);
    expect(countFrom(html, "combinations")).toBe(1);
    expect(countFrom(html, "meanings")).toBe(1);
    expect(countFrom(html, "plans")).toBe(1);
  });

  it("badges failed restrictions with the reason", () => {
    const html = renderTrace(trace);
    expect(html).toContain("badge-failed");
    expect(html).toContain("is not a 'person'");
    expect(html).toContain("badge-ok");
  });

  it("renders a placeholder before the first interpretation", () => {
    expect(renderTrace(null)).toContain("no interpretation yet");
  });
});

describe("page rendering", () => {
  it("escapes user text", () => {
    const state = applyAction(initialViewState, {
      kind: "utterance-sent",
      text: '<script>alert("x")</script>',
    });
    const html = renderApp(state);
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });

  it("locks the composer while a modal is open", () => {
    const online = applyAction(initialViewState, {
      kind: "connected",
      session: "sess-1",
    });
    const ready = renderApp(online);
    expect(ready).not.toMatch(/name="text"[^>]*disabled/);

    const withModal = applyAction(online, {
      kind: "server-event",
      envelope: {
        type: "event.inquiry",
        session: "sess-1",
        seq: 2,
        payload: {
          type: "inquiry",
          argument: "the red cube",
          language: "en",
          candidates: [{ id: "s:en:red.2", lemma: "red", gloss: "radical" }],
        },
      },
    });
    const html = renderApp(withModal);
    expect(html).toMatch(/name="text"[^>]*disabled/);
    expect(html).toContain('data-modal="inquiry"');
    expect(html).toContain("s:en:red.2");
    expect(html).toContain('data-form="define"');
  });

  it("offers one choose button per competing plan", () => {
    const plan = (id: string) => ({
      plan: id,
      strategy: "es:x",
      name: "n",
      bindings: {},
    });
    const state = applyAction(initialViewState, {
      kind: "server-event",
      envelope: {
        type: "event.ambiguity",
        session: "sess-1",
        seq: 1,
        payload: { type: "ambiguity", plans: [plan("plan:a"), plan("plan:b")] },
      },
    });
    const html = renderApp(state);
    expect(html).toContain('data-action="choose" data-index="0"');
    expect(html).toContain('data-action="choose" data-index="1"');
  });
});

describe("helpers", () => {
  it("escapes markup characters", () => {
    expect(escapeHtml(`<a href="x">&`)).toBe("&lt;a href=&quot;x&quot;&gt;&amp;");
  });

  it("parses relation lines into kind/target rows", () => {
    expect(parseRelationLines("color n:red\n  marked-by   n:dot  \n\n")).toEqual([
      ["color", "n:red"],
      ["marked-by", "n:dot"],
    ]);
    expect(parseRelationLines("")).toEqual([]);
  });
});
