from __future__ import annotations

import json

import httpx
import pytest

from policydag.backend import (
    BackendProfile,
    RateLimiter,
    RemoteBackend,
    StubBackend,
    parse_link_reply,
    parse_proposal_reply,
    stub_generate,
)
from policydag.dagbuild import ProposalRequest
from policydag.errors import BackendError
from policydag.mapping import LinkQuery
from policydag.model import Direction, Indicator

FRONTIER_PAYLOAD = {
    "frontier": [("L0N0", "a carbon tax is introduced", 0)],
    "max_branch": 3,
}

LINK_PAYLOAD = {
    "indicator_id": "gdp_growth",
    "nodes": [("L0N0", "a carbon tax is introduced", 0), ("L1N0", "energy costs rise", 1)],
    "max_links": 5,
}


class TestStubGenerate:
    def test_identical_inputs_identical_replies(self):
        a = stub_generate(42, "propose", FRONTIER_PAYLOAD)
        b = stub_generate(42, "propose", FRONTIER_PAYLOAD)
        assert a == b

    def test_different_seeds_differ(self):
        differing = 0
        for seed in range(100):
            a = stub_generate(seed, "propose", FRONTIER_PAYLOAD)
            b = stub_generate(seed + 1000, "propose", FRONTIER_PAYLOAD)
            if a.raw != b.raw:
                differing += 1
        assert differing > 95

    def test_empty_frontier_gives_valid_empty_batch(self):
        reply = stub_generate(42, "propose", {"frontier": [], "max_branch": 3})
        assert reply.parse_ok
        assert reply.payload == []

    def test_replies_pass_the_schema_gate(self):
        assert stub_generate(42, "propose", FRONTIER_PAYLOAD).parse_ok
        assert stub_generate(42, "link", LINK_PAYLOAD).parse_ok

    def test_link_direction_is_strict_enum(self):
        reply = stub_generate(42, "link", LINK_PAYLOAD)
        verdict = reply.payload
        if verdict.affected:
            assert verdict.direction in set(Direction)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            stub_generate(42, "other", {})


class TestParsers:
    def test_proposal_reply_happy_path(self):
        reply = parse_proposal_reply('{"proposals": [{"parent_id": "p", "text": "t"}]}')
        assert reply.parse_ok
        assert reply.payload[0].parent_id == "p"

    def test_proposal_reply_tolerates_fences(self):
        reply = parse_proposal_reply('```json\n{"proposals": []}\n```')
        assert reply.parse_ok

    def test_proposal_reply_garbage_fails_gate(self):
        assert not parse_proposal_reply("sorry, I cannot").parse_ok
        assert not parse_proposal_reply('{"wrong": 1}').parse_ok

    def test_link_reply_unaffected(self):
        reply = parse_link_reply('{"affected": false}')
        assert reply.parse_ok
        assert reply.payload.affected is False

    def test_link_reply_bad_direction_token_is_flagged(self):
        reply = parse_link_reply('{"affected": true, "direction": "up", "supporting_nodes": ["n"]}')
        assert reply.parse_ok
        assert reply.payload.direction is None  # caller must reprompt or fall back


class TestStubBackendGateway:
    def test_propose_is_deterministic(self):
        backend = StubBackend(BackendProfile(kind="stub", seed=42))
        request = ProposalRequest(
            description="a carbon tax", context={}, frontier=(("L0N0", "a carbon tax", 0),),
            max_branch=2, remaining_depth=1,
        )
        assert backend.propose_consequences(request, 0.7) == backend.propose_consequences(request, 0.7)

    def test_outage_marker_raises(self):
        backend = StubBackend(BackendProfile(kind="stub", seed=42))
        request = ProposalRequest(
            description="pension reform [backend-offline]", context={},
            frontier=(("L0N0", "x", 0),), max_branch=2, remaining_depth=1,
        )
        with pytest.raises(BackendError):
            backend.propose_consequences(request, 0.7)
        query = LinkQuery(
            description="pension reform [backend-offline]", context={},
            nodes=(("L0N0", "x", 0),), indicator=Indicator(id="a", name="a"), max_links=5,
        )
        with pytest.raises(BackendError):
            backend.link_indicator(query, 0.2)


def completion(content: str) -> dict:
    return {"choices": [{"message": {"content": content}}]}


def make_remote(handler, retry_limit=3, rate_limit=1000.0):
    sleeps: list[float] = []
    profile = BackendProfile(
        kind="remote", endpoint="https://backend.test/v1/chat", retry_limit=retry_limit,
        rate_limit=rate_limit,
    )
    backend = RemoteBackend(
        profile,
        api_key="secret",
        transport=httpx.MockTransport(handler),
        sleep=sleeps.append,
    )
    return backend, sleeps


PROPOSE_REQUEST = ProposalRequest(
    description="a carbon tax", context={"year": "2021"},
    frontier=(("L0N0", "a carbon tax", 0),), max_branch=2, remaining_depth=1,
)

LINK_QUERY = LinkQuery(
    description="a carbon tax", context={},
    nodes=(("L0N0", "a carbon tax", 0),),
    indicator=Indicator(id="gdp_growth", name="GDP growth", definition="growth"),
    max_links=5,
)


class TestRemoteBackend:
    def test_happy_path_with_bearer_header(self):
        seen = {}

        def handler(request: httpx.Request) -> httpx.Response:
            seen["auth"] = request.headers.get("Authorization")
            body = json.loads(request.content)
            seen["model"] = body["model"]
            return httpx.Response(200, json=completion(
                '{"proposals": [{"parent_id": "L0N0", "text": "energy costs rise"}]}'))

        backend, _ = make_remote(handler)
        proposals = backend.propose_consequences(PROPOSE_REQUEST, 0.7)
        assert [p.text for p in proposals] == ["energy costs rise"]
        assert seen["auth"] == "Bearer secret"

    def test_transport_retries_bounded_by_retry_limit(self):
        attempts = {"n": 0}

        def handler(request):
            attempts["n"] += 1
            return httpx.Response(503)

        backend, sleeps = make_remote(handler, retry_limit=3)
        with pytest.raises(BackendError):
            backend.propose_consequences(PROPOSE_REQUEST, 0.7)
        assert attempts["n"] == 4  # retry_limit + 1
        backoffs = [s for s in sleeps if s >= 0.1]  # ignore rate-limiter pacing
        assert len(backoffs) == 3
        assert all(0 < s <= 30 for s in backoffs)

    def test_backoff_grows_and_is_capped(self):
        def handler(request):
            return httpx.Response(500)

        backend, sleeps = make_remote(handler, retry_limit=8)
        with pytest.raises(BackendError):
            backend.propose_consequences(PROPOSE_REQUEST, 0.7)
        backoffs = [s for s in sleeps if s >= 0.1]  # ignore rate-limiter pacing
        # jittered exponential: each sleep within [base/2, cap]
        assert all(0.5 * min(30, 2 ** i) <= s <= 30.0 for i, s in enumerate(backoffs))

    def test_unparseable_reply_earns_one_reformat_reprompt(self):
        prompts = []

        def handler(request):
            body = json.loads(request.content)
            prompts.append(body["messages"][0]["content"])
            if len(prompts) == 1:
                return httpx.Response(200, json=completion("free prose, no JSON"))
            return httpx.Response(200, json=completion('{"proposals": []}'))

        backend, _ = make_remote(handler)
        assert backend.propose_consequences(PROPOSE_REQUEST, 0.7) == []
        assert len(prompts) == 2
        assert "could not be parsed" in prompts[1]

    def test_unknown_parent_ids_dropped_with_diagnostic(self):
        def handler(request):
            return httpx.Response(200, json=completion(
                '{"proposals": [{"parent_id": "ghost", "text": "x"},'
                ' {"parent_id": "L0N0", "text": "y"}]}'))

        backend, _ = make_remote(handler)
        diag: list[str] = []
        proposals = backend.propose_consequences(PROPOSE_REQUEST, 0.7, diag)
        assert [p.parent_id for p in proposals] == ["L0N0"]
        assert any("ghost" in d for d in diag)

    def test_empty_batch_is_a_valid_stop_signal(self):
        def handler(request):
            return httpx.Response(200, json=completion('{"proposals": []}'))

        backend, _ = make_remote(handler)
        assert backend.propose_consequences(PROPOSE_REQUEST, 0.7) == []

    def test_bad_direction_token_reprompts_then_falls_back(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            return httpx.Response(200, json=completion(
                '{"affected": true, "direction": "up", "supporting_nodes": ["L0N0"]}'))

        backend, _ = make_remote(handler)
        diag: list[str] = []
        verdict = backend.link_indicator(LINK_QUERY, 0.2, diag)
        assert calls["n"] == 2  # original + one strict reprompt
        assert verdict.direction is Direction.AMBIGUOUS
        assert any("falling back to ambiguous" in d for d in diag)

    def test_stray_support_on_unaffected_is_discarded(self):
        def handler(request):
            return httpx.Response(200, json=completion(
                '{"affected": false, "supporting_nodes": ["L0N0"]}'))

        backend, _ = make_remote(handler)
        verdict = backend.link_indicator(LINK_QUERY, 0.2)
        assert verdict.affected is False
        assert verdict.supporting_node_ids == ()


class TestRateLimiter:
    def test_paces_requests_with_fake_clock(self):
        now = {"t": 0.0}
        sleeps: list[float] = []

        def clock():
            return now["t"]

        def sleep(s):
            sleeps.append(s)
            now["t"] += s

        limiter = RateLimiter(rate=2.0, clock=clock, sleep=sleep)
        for _ in range(5):
            limiter.acquire()
        # 5 requests at 2/s: dispatch times 0, .5, 1, 1.5, 2
        assert now["t"] == pytest.approx(2.0)
        # never more than `rate` dispatches inside any one-second window
        assert max(sleeps) <= 0.5 + 1e-9

    def test_idle_time_is_not_banked(self):
        now = {"t": 0.0}
        limiter = RateLimiter(rate=1.0, clock=lambda: now["t"], sleep=lambda s: None)
        limiter.acquire()
        now["t"] = 100.0
        limiter.acquire()  # after a long idle gap, no burst credit builds up
        limiter.acquire()
        # third acquire must be scheduled 1s after the second
        assert limiter._next_free == pytest.approx(102.0)

    def test_rejects_nonpositive_rate(self):
        with pytest.raises(ValueError):
            RateLimiter(rate=0)
