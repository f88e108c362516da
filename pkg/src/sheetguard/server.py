"""HTTP API over a document session.

The transport between the inspection backend and its consumers: a
browser UI, scripts, CI.  Mutations serialize through the session;
report delivery long-polls the engine's mailbox, so a client holding
``GET /api/report?after=N`` wakes up as soon as a newer report lands
(or gets 204 at the timeout).  Optimistic concurrency: a PATCH carrying
``If-Match: <generation>`` is rejected with 409 when someone else wrote
first.
"""

from __future__ import annotations

import json
import logging
import posixpath
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .addressing import parse_address
from .edits import EditKind, StructuralEdit
from .engine import GuardianEngine
from .errors import SheetGuardError, UnknownName
from .findings import FindingFlag, FlagStatus, report_to_json
from .grid import CellContent, CellFormat
from .guardian import CellRole
from .inspections import ALL_RULE_IDS, StaticRuleConfig
from .scenarios import ScenarioResult
from .session import DocumentSession
from .storage import scenario_from_json, scenario_to_json
from .values import display_text

logger = logging.getLogger(__name__)

DEFAULT_POLL_TIMEOUT = 30.0

_MIME = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".svg": "image/svg+xml",
}


def scenario_result_to_json(result: ScenarioResult) -> dict:
    return {
        "scenario": result.scenario,
        "passed": result.passed,
        "problems": list(result.problems),
        "results": [
            {
                "target": r.target,
                "address": r.address.text() if r.address else None,
                "state": r.state,
                "actual": display_text(r.actual) if r.actual is not None else None,
                "expected": r.expected,
                "reason": r.reason,
            }
            for r in result.results
        ],
    }


class GuardianServer:
    """Threaded HTTP server bound to one session + engine."""

    def __init__(
        self,
        session: DocumentSession,
        engine: GuardianEngine,
        host: str = "127.0.0.1",
        port: int = 0,
        static_dir: str | Path | None = None,
        poll_timeout: float = DEFAULT_POLL_TIMEOUT,
    ):
        self.session = session
        self.engine = engine
        self.static_dir = Path(static_dir) if static_dir else None
        self.poll_timeout = poll_timeout

        outer = self

        class Handler(_GuardianHandler):
            server_ctx = outer

        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        logger.info("serving on %s", self.url)

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread:
            self._thread.join(timeout=5)


class _GuardianHandler(BaseHTTPRequestHandler):
    server_ctx: GuardianServer
    protocol_version = "HTTP/1.1"

    # --- plumbing ---

    def log_message(self, fmt, *args):  # route through logging, not stderr
        logger.debug("%s " + fmt, self.address_string(), *args)

    def _json_body(self):
        try:
            length = int(self.headers.get("Content-Length") or 0)
        except ValueError:
            raise _BadRequest("Content-Length must be an integer") from None
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return None
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise _BadRequest(f"body is not valid JSON: {exc}") from None

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_empty(self, status: int) -> None:
        self.send_response(status)
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _dispatch(self, method: str) -> None:
        path, _, query = self.path.partition("?")
        params = {}
        for pair in query.split("&"):
            if "=" in pair:
                k, _, v = pair.partition("=")
                params[k] = v
        try:
            handled = self._route(method, path, params)
        except _BadRequest as exc:
            self._send_json(400, {"error": str(exc)})
            return
        except _Conflict as exc:
            self._send_json(409, {"error": str(exc), "generation": self.server_ctx.session.generation})
            return
        except UnknownName as exc:
            self._send_json(404, {"error": str(exc)})
            return
        except SheetGuardError as exc:
            self._send_json(400, {"error": str(exc), "code": type(exc).__name__})
            return
        except Exception:
            logger.exception("internal error handling %s %s", method, path)
            self._send_json(500, {"error": "internal error"})
            return
        if not handled:
            self._send_json(404, {"error": f"no such endpoint: {method} {path}"})

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_PATCH(self):
        self._dispatch("PATCH")

    # --- routing ---

    def _route(self, method: str, path: str, params: dict) -> bool:
        ctx = self.server_ctx
        session = ctx.session

        if method == "GET" and path == "/api/workbook":
            gen, doc, values = session.workbook_doc()
            self._send_json(200, {"generation": gen, "workbook": doc, "values": values})
            return True

        if method == "PATCH" and path == "/api/cells":
            self._check_if_match()
            body = self._json_body()
            if not isinstance(body, list):
                raise _BadRequest("PATCH /api/cells expects a list of {addr, content}")
            edits = [self._parse_cell_edit(item) for item in body]
            receipt = session.set_cells(edits)
            self._send_json(200, {
                "generation": receipt.generation,
                "changed": [a.text() for a in receipt.changed],
            })
            return True

        if method == "POST" and path == "/api/structural":
            body = self._json_body() or {}
            kinds = {k.value: k for k in EditKind}
            kind = body.get("kind")
            if kind not in kinds:
                raise _BadRequest(f"kind must be one of {sorted(kinds)}")
            edit = StructuralEdit(
                kind=kinds[kind],
                sheet=str(body.get("sheet", "")),
                at=int(body.get("at", 0)),
                count=int(body.get("count", 1)),
            )
            receipt = session.apply_structural(edit)
            self._send_json(200, {"generation": receipt.generation})
            return True

        if method == "GET" and path == "/api/report":
            after = int(params.get("after", -1))
            report = ctx.engine.wait_for_report(after, timeout=ctx.poll_timeout)
            if report is None:
                self._send_empty(204)
            else:
                self._send_json(200, report_to_json(report))
            return True

        if method == "GET" and path == "/api/scenarios":
            self._send_json(200, {
                "scenarios": [scenario_to_json(s) for s in session.scenarios()],
            })
            return True

        if method == "POST" and path == "/api/scenarios":
            body = self._json_body()
            name, scenario = scenario_from_json(body, "scenario")
            session.add_scenario(scenario)
            verdict = session.validate_scenario_by_name(name)
            self._send_json(201, {
                "generation": session.generation,
                "name": name,
                "valid": verdict.ok,
                "issues": [
                    {"code": i.code, "message": i.message} for i in verdict.issues
                ],
            })
            return True

        if method == "POST" and path.startswith("/api/scenarios/") and path.endswith("/run"):
            name = path[len("/api/scenarios/"):-len("/run")]
            result = session.run_scenario_by_name(name)
            self._send_json(200, scenario_result_to_json(result))
            return True

        if method == "POST" and path == "/api/roles":
            body = self._json_body()
            if not isinstance(body, list):
                raise _BadRequest("POST /api/roles expects a list of {addr, role}")
            roles = {r.value: r for r in CellRole}
            markings = []
            for item in body:
                role = item.get("role")
                if role not in roles:
                    raise _BadRequest(f"role must be one of {sorted(roles)}")
                markings.append((parse_address(item.get("addr", "")), roles[role]))
            names = session.mark_roles(markings)
            self._send_json(200, {"names": names, "generation": session.generation})
            return True

        if method == "POST" and path.startswith("/api/findings/") and path.endswith("/flag"):
            key = path[len("/api/findings/"):-len("/flag")]
            body = self._json_body() or {}
            statuses = {s.value: s for s in FlagStatus}
            status = body.get("status")
            if status not in statuses:
                raise _BadRequest(f"status must be one of {sorted(statuses)}")
            until = body.get("until")
            if statuses[status] is FlagStatus.HOLD_OFF and not isinstance(until, int):
                raise _BadRequest("holdOff needs an integer 'until' generation")
            flag = FindingFlag(
                key=key,
                status=statuses[status],
                until_generation=until if statuses[status] is FlagStatus.HOLD_OFF else None,
                note=str(body.get("note", "")),
                author=str(body.get("author", "")),
                timestamp=str(body.get("timestamp", "")),
            )
            session.set_flag(flag)
            self._send_json(200, {"ok": True, "generation": session.generation})
            return True

        if method == "GET" and path == "/api/rules":
            config = session.rule_config
            self._send_json(200, {
                "rules": [
                    {"id": rule_id, "enabled": rule_id in config.enabled}
                    for rule_id in ALL_RULE_IDS
                ],
                "params": config.params,
            })
            return True

        if method == "PATCH" and path == "/api/rules":
            body = self._json_body() or {}
            config = session.rule_config
            enabled = set(config.enabled)
            for rule_id in body.get("enable", []):
                if rule_id not in ALL_RULE_IDS:
                    raise _BadRequest(f"unknown rule id: {rule_id}")
                enabled.add(rule_id)
            for rule_id in body.get("disable", []):
                if rule_id not in ALL_RULE_IDS:
                    raise _BadRequest(f"unknown rule id: {rule_id}")
                enabled.discard(rule_id)
            params = dict(config.params)
            for rule_id, p in body.get("params", {}).items():
                if rule_id not in ALL_RULE_IDS:
                    raise _BadRequest(f"unknown rule id: {rule_id}")
                params[rule_id] = p
            new_config = StaticRuleConfig(enabled=frozenset(enabled), params=params)
            session.set_rule_config(new_config)
            ctx.engine.config = new_config
            self._send_json(200, {
                "rules": [
                    {"id": rule_id, "enabled": rule_id in new_config.enabled}
                    for rule_id in ALL_RULE_IDS
                ],
                "params": new_config.params,
                "generation": session.generation,
            })
            return True

        if method == "GET":
            return self._serve_static(path)
        return False

    def _check_if_match(self) -> None:
        expected = self.headers.get("If-Match")
        if expected is None:
            return
        try:
            gen = int(expected.strip('"'))
        except ValueError:
            raise _BadRequest(f"If-Match must be a generation number, got {expected!r}") from None
        current = self.server_ctx.session.generation
        if gen != current:
            raise _Conflict(f"generation moved on: expected {gen}, document is at {current}")

    def _parse_cell_edit(self, item) -> tuple:
        if not isinstance(item, dict) or "addr" not in item:
            raise _BadRequest("each edit needs an 'addr'")
        addr = parse_address(item["addr"])
        fmt_data = item.get("format") or {}
        if set(fmt_data) - {"font", "fill"}:
            raise _BadRequest("format allows only 'font' and 'fill'")
        fmt = CellFormat(font_color=fmt_data.get("font"), fill_color=fmt_data.get("fill"))
        spec = item.get("content")
        if spec is None or spec == {}:
            return addr, CellContent.empty(fmt)
        if not isinstance(spec, dict):
            raise _BadRequest("content must be {'v': scalar} or {'f': formula} or null")
        if "f" in spec:
            return addr, CellContent.of_formula(str(spec["f"]), fmt)
        if "v" in spec:
            value = spec["v"]
            if not isinstance(value, (int, float, str, bool)):
                raise _BadRequest(f"cell value must be a number, text or boolean: {value!r}")
            try:
                return addr, CellContent.of_value(value, fmt)
            except (TypeError, ValueError) as exc:
                raise _BadRequest(str(exc)) from None
        raise _BadRequest("content must carry 'v' or 'f'")

    def _serve_static(self, path: str) -> bool:
        static_dir = self.server_ctx.static_dir
        if static_dir is None:
            return False
        clean = posixpath.normpath(path.lstrip("/"))
        if clean in (".", ""):
            clean = "index.html"
        target = (static_dir / clean).resolve()
        if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
            return False
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", _MIME.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        return True


class _BadRequest(Exception):
    pass


class _Conflict(Exception):
    pass


def serve(
    session: DocumentSession,
    engine: GuardianEngine,
    host: str = "127.0.0.1",
    port: int = 0,
    static_dir=None,
    poll_timeout: float = DEFAULT_POLL_TIMEOUT,
) -> GuardianServer:
    """Start the API server in a background thread; returns the handle."""
    server = GuardianServer(session, engine, host, port, static_dir, poll_timeout)
    server.start()
    return server
