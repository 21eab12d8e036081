/**
 * WebSocket <-> TCP relay. Browsers cannot open raw sockets, so each ws
 * connection gets its own TCP connection to the debug server and lines
 * are forwarded verbatim in both directions.
 */

import * as net from "node:net";
import { WebSocketServer, WebSocket } from "ws";

export interface Bridge {
  port: number;
  close(): void;
}

export function startBridge(
  wsPort: number,
  tcpHost: string,
  tcpPort: number,
): Promise<Bridge> {
  return new Promise((resolve, reject) => {
    const server = new WebSocketServer({ port: wsPort });
    server.on("error", reject);
    server.on("listening", () => {
      const address = server.address();
      const port = typeof address === "object" && address ? address.port : wsPort;
      resolve({ port, close: () => server.close() });
    });

    server.on("connection", (ws: WebSocket) => {
      const tcp = net.createConnection({ host: tcpHost, port: tcpPort });
      let buffer = "";

      tcp.on("data", (chunk) => {
        buffer += chunk.toString("utf-8");
        let newline;
        while ((newline = buffer.indexOf("\n")) >= 0) {
          const line = buffer.slice(0, newline);
          buffer = buffer.slice(newline + 1);
          if (line) ws.send(line);
        }
      });
      tcp.on("close", () => ws.close());
      tcp.on("error", () => ws.close());

      ws.on("message", (data) => {
        tcp.write(data.toString().replace(/\n?$/, "\n"));
      });
      ws.on("close", () => tcp.destroy());
      ws.on("error", () => tcp.destroy());
    });
  });
}
