import { Definition, PipelineTrace, PlanSummary } from "./protocol";
import { ChatItem, ViewState } from "./state";

// String-template rendering, no framework: the whole page is a pure
// function of ViewState, re-rendered wholesale on every change. The
// chat pane, modals, and the funnel inspector all read exclusively
// from the state object; nothing semantic is computed here.

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function renderBindings(plan: PlanSummary): string {
  const parts = Object.entries(plan.bindings).map(
    ([role, binding]) =>
      `<span class="binding">${escapeHtml(role)}=${escapeHtml(binding.label)}</span>`,
  );
  return parts.join(" ");
}

function renderPlanCard(plan: PlanSummary, index: number, choosable: boolean): string {
  const button = choosable
    ? `<button data-action="choose" data-index="${index}">run this</button>`
    : "";
  return `<div class="plan-card" data-plan="${escapeHtml(plan.plan)}">
    <div class="plan-name">${escapeHtml(plan.name)}</div>
    <div class="plan-strategy">${escapeHtml(plan.strategy)}</div>
    <div class="plan-bindings">${renderBindings(plan)}</div>
    ${button}
  </div>`;
}

function renderChatItem(item: ChatItem): string {
  if (item.role === "user") {
    return `<div class="msg msg-user">${escapeHtml(item.text)}</div>`;
  }
  switch (item.kind) {
    case "plans": {
      const cards = item.plans
        .map((plan, i) => renderPlanCard(plan, i, false))
        .join("");
      const n = item.plans.length;
      return `<div class="msg msg-agent" data-msg="plans">
        <div>${n} plan${n === 1 ? "" : "s"} ready</div>${cards}
      </div>`;
    }
    case "executed": {
      const steps = item.steps
        .map(
          (step) =>
            `<li>${escapeHtml(step.competency)}.${escapeHtml(step.action)} &rarr; ${escapeHtml(step.result)}</li>`,
        )
        .join("");
      return `<div class="msg msg-agent" data-msg="executed" data-plan="${escapeHtml(item.plan)}">
        <div>executed ${escapeHtml(item.plan)}</div><ul>${steps}</ul>
      </div>`;
    }
    case "info":
      return `<div class="msg msg-agent" data-msg="info">${escapeHtml(item.text)}</div>`;
    case "error":
      return `<div class="msg msg-agent msg-error" data-msg="error">${escapeHtml(item.text)}</div>`;
  }
}

const FUNNEL_STAGES: { key: keyof PipelineTrace["funnel"]; label: string }[] = [
  { key: "raw_pairs", label: "raw sense pairs" },
  { key: "combinations", label: "known combinations" },
  { key: "meanings", label: "meanings" },
  { key: "plans", label: "plans" },
];

// The stage funnel plus per-strategy verdicts. Counts come verbatim
// from the gateway's trace payload.
export function renderTrace(trace: PipelineTrace | null): string {
  if (trace === null) {
    return `<div class="trace trace-empty">no interpretation yet</div>`;
  }
  const stages = FUNNEL_STAGES.map(
    ({ key, label }) => `<div class="funnel-stage">
      <span class="funnel-count" data-stage="${key}">${trace.funnel[key]}</span>
      <span class="funnel-label">${label}</span>
    </div>`,
  ).join(`<div class="funnel-arrow">&rarr;</div>`);
  const args = trace.arguments
    .map(
      (arg) =>
        `<li>'${escapeHtml(arg.text)}': ${arg.raw_pairs} raw, ${arg.resolved} resolved${
          arg.inquiries > 0 ? `, ${arg.inquiries} asked` : ""
        }</li>`,
    )
    .join("");
  const verdicts = trace.validations
    .map((check) => {
      const badge = check.failed
        ? `<span class="badge badge-failed" title="${escapeHtml(check.failed.reason)}">${escapeHtml(check.failed.kind)}: ${escapeHtml(check.failed.reason)}</span>`
        : `<span class="badge badge-ok">ok</span>`;
      return `<li class="${check.valid ? "valid" : "invalid"}">${escapeHtml(check.name)} ${badge}</li>`;
    })
    .join("");
  return `<div class="trace" data-utterance="${escapeHtml(trace.utterance)}">
    <div class="funnel">${stages}</div>
    <ul class="trace-args">${args}</ul>
    <ul class="trace-verdicts">${verdicts}</ul>
  </div>`;
}

function renderModal(state: ViewState): string {
  const modal = state.modal;
  if (modal.kind === "none") return "";
  if (modal.kind === "ambiguity") {
    const cards = modal.plans
      .map((plan, i) => renderPlanCard(plan, i, true))
      .join("");
    return `<div class="modal" data-modal="ambiguity">
      <h2>several plans are possible</h2>${cards}
    </div>`;
  }
  const inquiry = modal.inquiry;
  const candidates = inquiry.candidates
    .map(
      (sense) => `<label class="sense-option">
        <input type="radio" name="sense" value="${escapeHtml(sense.id)}">
        ${escapeHtml(sense.id)} &mdash; ${escapeHtml(sense.gloss)}
      </label>`,
    )
    .join("");
  const diagnostics = inquiry.diagnostics
    ? `<div class="diagnostics">${escapeHtml(inquiry.diagnostics)}</div>`
    : "";
  return `<div class="modal" data-modal="inquiry">
    <h2>what is '${escapeHtml(inquiry.argument)}'?</h2>
    ${diagnostics}
    <form data-form="sense">
      ${candidates || `<div class="no-candidates">no known senses to offer</div>`}
      <button type="submit" ${candidates ? "" : "disabled"}>use selected sense</button>
    </form>
    <form data-form="define">
      <input name="lemma" placeholder="word (e.g. cube)" required>
      <input name="type" placeholder="concept it is a kind of (e.g. n:physical-object)" required>
      <textarea name="relations" placeholder="one relation per line: kind target"></textarea>
      <input name="gloss" placeholder="gloss (optional)">
      <button type="submit">define it</button>
    </form>
  </div>`;
}

export function renderApp(state: ViewState): string {
  const banner =
    state.banner === null
      ? ""
      : `<div class="banner" data-connection="${state.connection}">${escapeHtml(state.banner)}</div>`;
  const history = state.history.map(renderChatItem).join("");
  const composerLocked = state.modal.kind !== "none" || state.connection !== "online";
  return `${banner}
  <main class="chat" data-session="${escapeHtml(state.session ?? "")}">${history}</main>
  ${renderModal(state)}
  <form data-form="utterance">
    <input name="text" placeholder="tell the agent what to do" ${composerLocked ? "disabled" : ""}>
    <button type="submit" ${composerLocked ? "disabled" : ""}>say</button>
  </form>
  <section class="inspector">
    <button data-action="refresh-trace">inspect last interpretation</button>
    ${renderTrace(state.trace)}
  </section>`;
}

export type ViewCallbacks = {
  submitUtterance: (text: string) => void;
  answerSense: (id: string) => void;
  answerDefinition: (definition: Definition) => void;
  choosePlan: (index: number) => void;
  refreshTrace: () => void;
};

export function parseRelationLines(text: string): string[][] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => line.split(/\s+/));
}

// One delegated listener pair on the root; re-rendering replaces the
// children, never the root, so the page outlives every state change.
export function mountView(
  root: HTMLElement,
  callbacks: ViewCallbacks,
): { update: (state: ViewState) => void } {
  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (!(target instanceof HTMLElement)) return;
    const action = target.dataset.action;
    if (action === "choose") {
      callbacks.choosePlan(Number(target.dataset.index));
    } else if (action === "refresh-trace") {
      callbacks.refreshTrace();
    }
  });

  const fieldValue = (form: HTMLFormElement, name: string): string => {
    const el = form.querySelector(`[name="${name}"]`);
    return el instanceof HTMLInputElement || el instanceof HTMLTextAreaElement
      ? el.value
      : "";
  };

  root.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    event.preventDefault();
    const kind = form.dataset.form;
    if (kind === "utterance") {
      const text = fieldValue(form, "text").trim();
      if (text.length > 0) callbacks.submitUtterance(text);
    } else if (kind === "sense") {
      const checked = Array.from(
        form.querySelectorAll<HTMLInputElement>('input[name="sense"]'),
      ).find((radio) => radio.checked);
      if (checked && checked.value.length > 0) callbacks.answerSense(checked.value);
    } else if (kind === "define") {
      const lemma = fieldValue(form, "lemma").trim();
      const type = fieldValue(form, "type").trim();
      if (lemma.length === 0 || type.length === 0) return;
      const definition: Definition = {
        lemma,
        type,
        relations: parseRelationLines(fieldValue(form, "relations")),
      };
      const gloss = fieldValue(form, "gloss").trim();
      if (gloss.length > 0) definition.gloss = gloss;
      callbacks.answerDefinition(definition);
    }
  });

  return {
    update(state: ViewState) {
      root.innerHTML = renderApp(state);
    },
  };
}
