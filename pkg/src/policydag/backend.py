"""Text-generation backends behind the two pipeline capabilities.

Two implementations share one wire format and one parser: a remote client
for any chat-completion-style HTTP endpoint, and a deterministic offline
stub whose replies are a pure function of (seed, request payload).
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable

import httpx

from .dagbuild import Proposal, ProposalRequest
from .errors import BackendError
from .mapping import LinkQuery, LinkVerdict
from .model import Direction

BACKOFF_BASE = 1.0
BACKOFF_CAP = 30.0

# a stub-backed episode whose description contains this marker simulates an
# unreachable backend; used by fixtures that need a deterministic error path
STUB_FAIL_MARKER = "[backend-offline]"


@dataclass(frozen=True)
class BackendProfile:
    kind: str = "stub"  # "remote" | "stub"
    endpoint: str = ""
    model_name: str = "stub"
    api_key_ref: str = "POLICYDAG_API_KEY"
    timeout: float = 60.0
    retry_limit: int = 3
    rate_limit: float = 5.0  # max requests per second (remote only)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("remote", "stub"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote backend requires an endpoint")


@dataclass(frozen=True)
class StructuredReply:
    raw: str
    payload: Any = None
    parse_ok: bool = False


AuditHook = Callable[[dict[str, Any]], None]


def load_prompt(name: str) -> str:
    return resources.files("policydag.data.prompts").joinpath(f"{name}.txt").read_text("utf-8")


# ---------------------------------------------------------------------------
# reply parsing (shared by remote and stub)


def _extract_json(text: str) -> Any:
    """Parse a JSON object, tolerating markdown fences around it."""
    stripped = text.strip()
    if stripped.startswith("```"):
        stripped = stripped.strip("`")
        if stripped.startswith("json"):
            stripped = stripped[4:]
    start = stripped.find("{")
    end = stripped.rfind("}")
    if start == -1 or end == -1:
        raise ValueError("no JSON object found")
    return json.loads(stripped[start:end + 1])


def parse_proposal_reply(text: str) -> StructuredReply:
    try:
        payload = _extract_json(text)
        items = payload["proposals"]
        proposals = [Proposal(parent_id=str(p["parent_id"]), text=str(p["text"])) for p in items]
    except (ValueError, KeyError, TypeError):
        return StructuredReply(raw=text)
    return StructuredReply(raw=text, payload=proposals, parse_ok=True)


def parse_link_reply(text: str) -> StructuredReply:
    try:
        payload = _extract_json(text)
        affected = payload["affected"]
        if not isinstance(affected, bool):
            raise ValueError("affected must be boolean")
        if not affected:
            return StructuredReply(raw=text, payload=LinkVerdict(affected=False), parse_ok=True)
        direction_token = str(payload.get("direction", ""))
        supporting = tuple(str(s) for s in payload.get("supporting_nodes", []))
        try:
            direction = Direction(direction_token)
        except ValueError:
            # schema-valid apart from the enum token; caller decides on reprompt
            return StructuredReply(
                raw=text,
                payload=LinkVerdict(affected=True, direction=None, supporting_node_ids=supporting),
                parse_ok=True,
            )
        verdict = LinkVerdict(affected=True, direction=direction, supporting_node_ids=supporting)
    except (ValueError, KeyError, TypeError):
        return StructuredReply(raw=text)
    return StructuredReply(raw=text, payload=verdict, parse_ok=True)


# ---------------------------------------------------------------------------
# rate limiting


class RateLimiter:
    """Token-bucket limiter shared by concurrent workers.

    Clock and sleep are injectable so tests can verify pacing with a fake
    clock instead of wall time.
    """

    def __init__(
        self,
        rate: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_free = clock()

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            wait = self._next_free - now
            self._next_free = max(self._next_free, now) + 1.0 / self.rate
        if wait > 0:
            self._sleep(wait)


# ---------------------------------------------------------------------------
# deterministic stub


_STUB_SUBJECTS = (
    "household income", "unemployment", "public debt", "consumer prices",
    "private investment", "social spending", "tax revenue", "energy costs",
    "housing demand", "exports", "regional employment", "public trust",
    "school enrollment", "healthcare access", "carbon emissions",
)
_STUB_VERBS = ("rises", "falls", "stabilizes", "grows", "declines", "shifts")

_VOTE_PERCENT = 12
# direction split: 45% increase, 45% decrease, 10% ambiguous
_DIRECTION_CUTS = (45, 90)


def _digest(*parts: Any) -> int:
    h = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).hexdigest()
    return int(h, 16)


def stub_generate(seed: int, kind: str, payload: dict[str, Any]) -> StructuredReply:
    """Pure function of (seed, kind, payload) producing a wire-format reply.

    Proposal texts are template sentences keyed by a seeded hash of the
    parent text; link verdicts hash (indicator id, node text) into votes with
    fixed proportions. Replies go through the real parsers so the stub
    exercises the same schema gate as the remote path.
    """
    if kind == "propose":
        proposals = []
        for parent_id, parent_text, _layer in payload.get("frontier", []):
            for k in range(int(payload["max_branch"])):
                h = _digest(seed, "propose", parent_text, k)
                subject = _STUB_SUBJECTS[h % len(_STUB_SUBJECTS)]
                verb = _STUB_VERBS[(h // len(_STUB_SUBJECTS)) % len(_STUB_VERBS)]
                proposals.append({"parent_id": parent_id, "text": f"{subject} {verb}"})
        return parse_proposal_reply(json.dumps({"proposals": proposals}))
    if kind == "link":
        indicator_id = payload["indicator_id"]
        votes = [
            node_id
            for node_id, text, _layer in payload["nodes"]
            if _digest(seed, "vote", indicator_id, text) % 100 < _VOTE_PERCENT
        ]
        if not votes:
            return parse_link_reply(json.dumps({"affected": False}))
        supporting = votes[: int(payload["max_links"])]
        d = _digest(seed, "direction", indicator_id, tuple(supporting)) % 100
        if d < _DIRECTION_CUTS[0]:
            direction = "increase"
        elif d < _DIRECTION_CUTS[1]:
            direction = "decrease"
        else:
            direction = "ambiguous"
        return parse_link_reply(
            json.dumps({"affected": True, "direction": direction, "supporting_nodes": supporting})
        )
    raise ValueError(f"unknown stub request kind {kind!r}")


# ---------------------------------------------------------------------------
# gateways


class StubBackend:
    """Offline backend: deterministic, bit-identical replies per (seed, payload)."""

    def __init__(self, profile: BackendProfile, audit: AuditHook | None = None) -> None:
        self.profile = profile
        self._audit = audit

    def _record(self, kind: str, reply: StructuredReply) -> None:
        if self._audit is not None:
            self._audit({"kind": kind, "attempt": 1, "parse_ok": reply.parse_ok})

    def propose_consequences(
        self,
        request: ProposalRequest,
        temperature: float,
        diagnostics: list[str] | None = None,
    ) -> list[Proposal]:
        if STUB_FAIL_MARKER in request.description:
            raise BackendError("simulated backend outage")
        reply = stub_generate(
            self.profile.seed,
            "propose",
            {"frontier": list(request.frontier), "max_branch": request.max_branch},
        )
        self._record("propose", reply)
        return list(reply.payload)

    def link_indicator(
        self,
        query: LinkQuery,
        link_temperature: float,
        diagnostics: list[str] | None = None,
    ) -> LinkVerdict:
        if STUB_FAIL_MARKER in query.description:
            raise BackendError("simulated backend outage")
        reply = stub_generate(
            self.profile.seed,
            "link",
            {
                "indicator_id": query.indicator.id,
                "nodes": list(query.nodes),
                "max_links": query.max_links,
            },
        )
        self._record("link", reply)
        return reply.payload


class RemoteBackend:
    """Client for a generic chat-completion HTTP endpoint.

    Transport failures are retried with exponential backoff and jitter; an
    unparseable reply earns one reformat-reprompt before counting as a
    failure. No reply that fails the schema gate ever reaches a caller.
    """

    def __init__(
        self,
        profile: BackendProfile,
        api_key: str | None = None,
        audit: AuditHook | None = None,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self.profile = profile
        self._api_key = api_key
        self._audit = audit
        self._sleep = sleep
        self._limiter = RateLimiter(profile.rate_limit, clock=clock, sleep=sleep)
        self._client = httpx.Client(timeout=profile.timeout, transport=transport)
        self._rng = random.Random()
        self._propose_template = load_prompt("propose")
        self._link_template = load_prompt("link")

    def close(self) -> None:
        self._client.close()

    def _record(self, kind: str, attempt: int, parse_ok: bool) -> None:
        if self._audit is not None:
            self._audit({"kind": kind, "attempt": attempt, "parse_ok": parse_ok})

    def _complete(self, prompt: str, temperature: float, kind: str, attempt: int) -> str:
        self._limiter.acquire()
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        body = {
            "model": self.profile.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
        }
        response = self._client.post(self.profile.endpoint, json=body, headers=headers)
        response.raise_for_status()
        return response.json()["choices"][0]["message"]["content"]

    def _request(
        self,
        prompt: str,
        temperature: float,
        kind: str,
        parser: Callable[[str], StructuredReply],
    ) -> StructuredReply:
        attempts = 0
        last_error: Exception | None = None
        reprompted = False
        current_prompt = prompt
        while attempts <= self.profile.retry_limit:
            attempts += 1
            try:
                content = self._complete(current_prompt, temperature, kind, attempts)
            except (httpx.HTTPError, KeyError, IndexError) as exc:
                last_error = exc
                self._record(kind, attempts, False)
                if attempts <= self.profile.retry_limit:
                    backoff = min(BACKOFF_CAP, BACKOFF_BASE * 2 ** (attempts - 1))
                    self._sleep(backoff * (0.5 + self._rng.random() / 2))
                continue
            reply = parser(content)
            self._record(kind, attempts, reply.parse_ok)
            if reply.parse_ok:
                return reply
            last_error = ValueError(f"unparseable reply: {content[:200]!r}")
            if not reprompted:
                reprompted = True
                current_prompt = (
                    prompt
                    + "\n\nYour previous reply could not be parsed. "
                    "Reply again with only the requested JSON object and nothing else."
                )
        raise BackendError(f"{kind} request failed after {attempts} attempts: {last_error}")

    def propose_consequences(
        self,
        request: ProposalRequest,
        temperature: float,
        diagnostics: list[str] | None = None,
    ) -> list[Proposal]:
        frontier_lines = "\n".join(f"- {nid}: {text}" for nid, text, _ in request.frontier)
        context_lines = "\n".join(f"- {k}: {v}" for k, v in sorted(request.context.items())) or "(none)"
        prompt = self._propose_template.format(
            description=request.description,
            context=context_lines,
            frontier=frontier_lines,
            max_branch=request.max_branch,
        )
        reply = self._request(prompt, temperature, "propose", parse_proposal_reply)
        frontier_ids = {nid for nid, _, _ in request.frontier}
        kept = []
        for p in reply.payload:
            if p.parent_id in frontier_ids:
                kept.append(p)
            elif diagnostics is not None:
                diagnostics.append(f"backend proposed unknown parent {p.parent_id!r}; dropped")
        return kept

    def link_indicator(
        self,
        query: LinkQuery,
        link_temperature: float,
        diagnostics: list[str] | None = None,
    ) -> LinkVerdict:
        node_lines = "\n".join(f"- {nid} (layer {layer}): {text}" for nid, text, layer in query.nodes)
        context_lines = "\n".join(f"- {k}: {v}" for k, v in sorted(query.context.items())) or "(none)"
        prompt = self._link_template.format(
            description=query.description,
            context=context_lines,
            nodes=node_lines,
            indicator_id=query.indicator.id,
            indicator_name=query.indicator.name,
            indicator_definition=query.indicator.definition,
            max_links=query.max_links,
        )
        reply = self._request(prompt, link_temperature, "link", parse_link_reply)
        verdict: LinkVerdict = reply.payload
        if verdict.affected and verdict.direction is None:
            # bad direction token: one strict reprompt, then honest fallback
            strict = prompt + "\n\nThe direction must be exactly one of: increase, decrease, ambiguous."
            retry = self._request(strict, link_temperature, "link", parse_link_reply)
            verdict = retry.payload
            if verdict.affected and verdict.direction is None:
                if diagnostics is not None:
                    diagnostics.append(
                        f"{query.indicator.id}: direction token invalid twice; falling back to ambiguous"
                    )
                verdict = LinkVerdict(
                    affected=True,
                    direction=Direction.AMBIGUOUS,
                    supporting_node_ids=verdict.supporting_node_ids,
                )
        return verdict


def make_backend(
    profile: BackendProfile,
    api_key: str | None = None,
    audit: AuditHook | None = None,
) -> StubBackend | RemoteBackend:
    if profile.kind == "stub":
        return StubBackend(profile, audit=audit)
    return RemoteBackend(profile, api_key=api_key, audit=audit)
