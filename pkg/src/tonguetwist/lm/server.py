"""Minimal HTTP server exposing any local provider over the remote wire protocol."""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

log = logging.getLogger(__name__)


def _handler_for(provider):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            log.debug(fmt, *args)

        def _reply(self, status, body):
            data = json.dumps(body).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_POST(self):
            try:
                length = int(self.headers.get("Content-Length", 0))
                req = json.loads(self.rfile.read(length) or b"{}")
            except (ValueError, json.JSONDecodeError):
                return self._reply(400, {"error": "invalid JSON"})
            try:
                if self.path == "/v1/next_token":
                    cands = provider.next_token_distribution(req["context"], int(req["top_k"]))
                    return self._reply(200, {"candidates": [
                        {"token": c.token, "logprob": c.logprob} for c in cands]})
                if self.path == "/v1/score":
                    return self._reply(200, {"logprobs": provider.score(req["tokens"])})
                if self.path == "/v1/generate":
                    text = provider.generate(req["prompt"], max_tokens=int(req["max_tokens"]),
                                             temperature=float(req["temperature"]))
                    return self._reply(200, {"text": text})
            except (KeyError, TypeError, ValueError) as exc:
                return self._reply(400, {"error": f"bad request: {exc}"})
            return self._reply(404, {"error": f"unknown path {self.path}"})

    return Handler


def make_server(provider, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), _handler_for(provider))


def serve_in_thread(provider, host: str = "127.0.0.1", port: int = 0):
    """Start a server on a daemon thread; returns (server, base_url)."""
    server = make_server(provider, host, port)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    h, p = server.server_address[:2]
    return server, f"http://{h}:{p}"
