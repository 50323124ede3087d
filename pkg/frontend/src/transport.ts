// A transport is any bidirectional line pipe carrying the gateway's
// newline-delimited JSON. The client never touches sockets directly,
// so tests can swap in an in-memory pipe and the browser build can
// ride a WebSocket byte bridge while node uses plain TCP.

export type TransportHandlers = {
  onLine: (line: string) => void;
  onClose: (reason: string) => void;
};

export interface LineTransport {
  send(line: string): void;
  close(): void;
}

export type TransportFactory = (handlers: TransportHandlers) => Promise<LineTransport>;

// TCP transport for node contexts (tests, headless drivers). Import is
// dynamic so bundling src/ for the browser never pulls in node:net.
export function tcpTransport(host: string, port: number): TransportFactory {
  return async (handlers) => {
    const net = await import("node:net");
    const socket = net.createConnection({ host, port });
    let buffer = "";
    let closed = false;

    socket.setEncoding("utf8");
    socket.on("data", (chunk: string) => {
      buffer += chunk;
      for (;;) {
        const nl = buffer.indexOf("\n");
        if (nl < 0) break;
        const line = buffer.slice(0, nl);
        buffer = buffer.slice(nl + 1);
        if (line.trim().length > 0) handlers.onLine(line);
      }
    });
    const reportClose = (reason: string) => {
      if (closed) return;
      closed = true;
      handlers.onClose(reason);
    };
    socket.on("error", (err: Error) => reportClose(err.message));
    socket.on("close", () => reportClose("connection closed"));

    await new Promise<void>((resolve, reject) => {
      socket.once("connect", () => resolve());
      socket.once("error", reject);
    });

    return {
      send(line: string) {
        socket.write(line.endsWith("\n") ? line : line + "\n");
      },
      close() {
        closed = true;
        socket.destroy();
      },
    };
  };
}

// WebSocket transport for the browser page. Each WS message is one or
// more protocol lines; a relay in front of the gateway just shovels
// bytes both ways.
export function webSocketTransport(url: string): TransportFactory {
  return (handlers) =>
    new Promise((resolve, reject) => {
      const ws = new WebSocket(url);
      let buffer = "";
      ws.onmessage = (msg) => {
        buffer += String(msg.data);
        for (;;) {
          const nl = buffer.indexOf("\n");
          if (nl < 0) break;
          const line = buffer.slice(0, nl);
          buffer = buffer.slice(nl + 1);
          if (line.trim().length > 0) handlers.onLine(line);
        }
      };
      ws.onclose = () => handlers.onClose("connection closed");
      ws.onerror = () => reject(new Error(`cannot reach ${url}`));
      ws.onopen = () =>
        resolve({
          send(line: string) {
            ws.send(line.endsWith("\n") ? line : line + "\n");
          },
          close() {
            ws.close();
          },
        });
    });
}
