// Spawns the real dialogue gateway for tests. Nothing is mocked: every
// client test talks TCP to the engine serving the bundled fixtures.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";
import path from "node:path";

import { App } from "../src/controller";
import { ViewState } from "../src/state";
import { tcpTransport } from "../src/transport";

const here = path.dirname(fileURLToPath(import.meta.url));
export const repoRoot = path.resolve(here, "..", "..");

const engineEnv = {
  ...process.env,
  PYTHONPATH: path.join(repoRoot, "src"),
};

export type RunningGateway = {
  port: number;
  stop: () => void;
};

export function startGateway(kb: string): Promise<RunningGateway> {
  const child: ChildProcess = spawn(
    "python3",
    [
      "-m", "frameground.cli", "serve",
      "--kb", path.join(repoRoot, "fixtures", kb),
      "--host", "127.0.0.1",
      "--port", "0",
      "--heartbeat", "0",
    ],
    { cwd: repoRoot, env: engineEnv, stdio: ["ignore", "pipe", "pipe"] },
  );

  return new Promise((resolve, reject) => {
    let out = "";
    let err = "";
    const timer = setTimeout(() => {
      child.kill();
      reject(new Error(`gateway did not report a port in time; stderr: ${err}`));
    }, 15000);

    child.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const match = out.match(/listening on [\d.]+:(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve({
          port: Number(match[1]),
          stop: () => child.kill(),
        });
      }
    });
    child.stderr!.on("data", (chunk: Buffer) => {
      err += chunk.toString();
    });
    child.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`gateway exited with ${code}; stderr: ${err}`));
    });
  });
}

// The batch run of a bundled scenario transcript, returning the
// canonical event log the engine printed. This is the reference side
// of the "live drive equals batch run" diff.
export function batchEventLog(scenario: string, kb: string): unknown[] {
  const result = spawnSync(
    "python3",
    [
      "-m", "frameground.cli", "run",
      path.join(repoRoot, "scenarios", `${scenario}.txt`),
      "--kb", path.join(repoRoot, "fixtures", kb),
      "--emit-events",
    ],
    { cwd: repoRoot, env: engineEnv, encoding: "utf8" },
  );
  if (result.status !== 0) {
    throw new Error(`batch run failed (${result.status}): ${result.stderr}`);
  }
  const lines = result.stdout.trim().split("\n");
  return JSON.parse(lines[lines.length - 1]);
}

export function connectApp(
  port: number,
  options: Partial<Parameters<typeof App.start>[0]> = {},
): Promise<App> {
  return App.start({
    transportFactory: tcpTransport("127.0.0.1", port),
    replyTimeoutMs: 10000,
    ...options,
  });
}

export function waitFor(
  app: App,
  predicate: (state: ViewState) => boolean,
  label: string,
  timeoutMs = 10000,
): Promise<ViewState> {
  return new Promise((resolve, reject) => {
    if (predicate(app.state())) {
      resolve(app.state());
      return;
    }
    const timer = setTimeout(() => {
      unsubscribe();
      reject(
        new Error(
          `timed out waiting for ${label}; state: ${JSON.stringify(app.state(), null, 2).slice(0, 800)}`,
        ),
      );
    }, timeoutMs);
    const unsubscribe = app.onChange((state) => {
      if (predicate(state)) {
        clearTimeout(timer);
        unsubscribe();
        resolve(state);
      }
    });
  });
}
