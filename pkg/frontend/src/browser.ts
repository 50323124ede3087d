import { App } from "./controller";
import { webSocketTransport } from "./transport";
import { mountView } from "./view";

// Browser bootstrap. The page speaks the gateway's line protocol over
// a WebSocket byte bridge (`?ws=` overrides the default endpoint);
// everything after the handshake is the same code the tests drive
// over TCP.

function endpoint(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("ws") ?? "ws://127.0.0.1:7402";
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (root === null) throw new Error("missing #app element");

  const app = await App.start({
    transportFactory: webSocketTransport(endpoint()),
    policy: "ask_user",
    reconnectAttempts: 10,
    reconnectDelayMs: 1500,
  });

  const view = mountView(root, {
    submitUtterance: (text) => app.sendUtterance(text),
    answerSense: (id) => app.answerInquiry({ sense: id }),
    answerDefinition: (definition) => app.answerInquiry({ definition }),
    choosePlan: (index) => app.choosePlan(index),
    refreshTrace: () => void app.refreshTrace(),
  });

  app.onChange((state) => view.update(state));
  view.update(app.state());
}

boot().catch((err) => {
  const root = document.getElementById("app");
  if (root) {
    root.textContent = `failed to start: ${err instanceof Error ? err.message : err}`;
  }
});
