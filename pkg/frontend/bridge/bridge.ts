/**
 * Bridge CLI:
 *   node dist/bridge/bridge.js [--ws-port 7740] [--tcp-host 127.0.0.1] [--tcp-port 7737]
 */

import { startBridge } from "./relay.js";

function arg(name: string, fallback: string): string {
  const index = process.argv.indexOf(name);
  return index >= 0 ? process.argv[index + 1] ?? fallback : fallback;
}

const wsPort = Number(arg("--ws-port", "7740"));
const tcpHost = arg("--tcp-host", "127.0.0.1");
const tcpPort = Number(arg("--tcp-port", "7737"));

startBridge(wsPort, tcpHost, tcpPort).then(
  (bridge) =>
    console.error(`bridge: ws://127.0.0.1:${bridge.port} <-> tcp ${tcpHost}:${tcpPort}`),
  (err) => {
    console.error(`bridge failed: ${err}`);
    process.exit(1);
  },
);
