// Entry point: create a match over REST, attach the socket, wire the keys.

import { ClientEvent } from "./protocol.js";
import { MatchView } from "./view.js";

async function createMatch(): Promise<string> {
  const response = await fetch("/api/match", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({}),
  });
  if (!response.ok) {
    throw new Error(`match creation failed: ${response.status}`);
  }
  const body = (await response.json()) as { session_id: string };
  return body.session_id;
}

function connect(view: MatchView, sessionId: string, sendRef: { current: (e: ClientEvent) => void }): WebSocket {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const socket = new WebSocket(`${scheme}://${location.host}/api/match/${sessionId}/play`);
  sendRef.current = (event) => socket.send(JSON.stringify(event));
  socket.onmessage = (frame) => view.handleEvent(frame.data);
  socket.onopen = () => view.setConnectionStatus(true);
  socket.onclose = () => view.setConnectionStatus(false);
  return socket;
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const sendRef = { current: (_: ClientEvent) => {} };
  const view = new MatchView(root, (event) => sendRef.current(event));
  const sessionId = await createMatch();
  let socket = connect(view, sessionId, sendRef);

  document.addEventListener("keydown", (key) => {
    if (key.target === view.answerInput) {
      if (key.key === "Enter") {
        view.submitAnswer(view.answerInput.value);
        view.answerInput.value = "";
      }
      return;
    }
    if (key.key === " " || key.code === "Space") {
      key.preventDefault();
      view.buzz();
    } else if (key.key === "n" || key.key === "N") {
      view.next();
    } else if ((key.key === "r" || key.key === "R") && socket.readyState === WebSocket.CLOSED) {
      socket = connect(view, sessionId, sendRef);
    }
  });
}

start().catch((error) => {
  const root = document.getElementById("app");
  if (root) root.textContent = `Could not start a match: ${error}`;
});
