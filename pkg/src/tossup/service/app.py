"""HTTP/WebSocket host for live matches.

REST surface:
    POST /api/match {packet_id?, tick_ms?}  -> {session_id, question_count}
    GET  /api/match/{id}                    -> scoreboard
WebSocket /api/match/{id}/play streams one JSON object per frame:
server->client word / machine_buzz / result / score / finished / error;
client->server buzz / answer / next.
"""

from __future__ import annotations

import asyncio
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..simulate import ScoreRules
from .session import JudgeConfig, MatchSession

_CLIENT_EVENTS = {"buzz": "human_buzz", "answer": "human_answer", "next": "next_question"}


@dataclass
class ServiceState:
    """Shared, immutable artifacts plus the live session table."""

    questions: Sequence = ()
    agent_factory: object = None  # callable returning a fresh LiveAgent
    judge: JudgeConfig = field(default_factory=JudgeConfig)
    rules: ScoreRules = field(default_factory=ScoreRules)
    packets: Mapping[str, Sequence[int]] = field(default_factory=dict)
    default_tick_ms: int = 400
    sessions: dict = field(default_factory=dict)
    locks: dict = field(default_factory=dict)


def create_app(state: ServiceState, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="tossup live match service")
    app.state.service = state

    @app.post("/api/match")
    async def create_match(body: dict | None = None):
        body = body or {}
        if state.agent_factory is None:
            return JSONResponse({"error": "no trained agent loaded"}, status_code=409)
        packet_id = body.get("packet_id")
        if packet_id is not None:
            if packet_id not in state.packets:
                return JSONResponse({"error": f"unknown packet {packet_id!r}"}, status_code=404)
            wanted = set(state.packets[packet_id])
            questions = [q for q in state.questions if q.qanta_id in wanted]
        else:
            questions = list(state.questions)
        if not questions:
            return JSONResponse({"error": "packet has no questions"}, status_code=400)
        tick_ms = int(body.get("tick_ms", state.default_tick_ms))
        session_id = uuid.uuid4().hex
        session = MatchSession(
            session_id=session_id,
            questions=questions,
            agent=state.agent_factory(),
            judge=state.judge,
            rules=state.rules,
            tick_ms=tick_ms,
        )
        state.sessions[session_id] = session
        state.locks[session_id] = asyncio.Lock()
        return {"session_id": session_id, "question_count": len(questions)}

    @app.get("/api/match/{session_id}")
    async def scoreboard(session_id: str):
        session = state.sessions.get(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        return session.scoreboard()

    @app.websocket("/api/match/{session_id}/play")
    async def play(websocket: WebSocket, session_id: str):
        session = state.sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        lock = state.locks[session_id]
        await websocket.accept()

        async def emit(events):
            for event in events:
                await websocket.send_json(event)

        async def ticker():
            while session.state != "finished":
                await asyncio.sleep(session.tick_ms / 1000.0)
                async with lock:
                    if session.state != "revealing":
                        continue
                    await emit(session.step({"type": "tick"}))

        tick_task = asyncio.create_task(ticker())
        try:
            while True:
                try:
                    message = await websocket.receive_json()
                except ValueError:  # non-JSON frame; keep the session alive
                    async with lock:
                        await emit([{"type": "error", "message": "frames must be JSON objects"}])
                    continue
                if not isinstance(message, dict):
                    async with lock:
                        await emit([{"type": "error", "message": "frames must be JSON objects"}])
                    continue
                event_type = _CLIENT_EVENTS.get(message.get("type"))
                async with lock:
                    if event_type is None:
                        await emit([{"type": "error",
                                     "message": f"unknown message {message.get('type')!r}"}])
                        continue
                    translated = dict(message)
                    translated["type"] = event_type
                    events = session.step(translated)
                    await emit(events)
                if session.state == "finished":
                    break
        except WebSocketDisconnect:
            pass
        finally:
            tick_task.cancel()

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="frontend")

    return app
