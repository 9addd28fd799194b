import http.server
import json
import threading

import pytest

from workatlas.annotate import (
    AnnotatorTransportError,
    KeywordAnnotator,
    KeywordRule,
    RemoteAnnotator,
    ReplayAnnotator,
    format_candidates,
    parse_candidates,
)


class TestParseCandidates:
    def test_empty_text_means_no_candidates(self):
        assert parse_candidates("") == ([], 0)
        assert parse_candidates("   \n ") == ([], 0)
        assert parse_candidates("[]") == ([], 0)

    def test_json_array_of_arrays(self):
        sequences, failed = parse_candidates('[["A", "B", "C"], ["D", "E", "F"]]')
        assert sequences == [["A", "B", "C"], ["D", "E", "F"]]
        assert failed == 0

    def test_json_array_of_separator_strings(self):
        sequences, failed = parse_candidates('["A > B > C"]')
        assert sequences == [["A", "B", "C"]]
        assert failed == 0

    def test_line_grammar(self):
        sequences, failed = parse_candidates("A > B > C\nD>E>F\n")
        assert sequences == [["A", "B", "C"], ["D", "E", "F"]]
        assert failed == 0

    def test_prose_line_becomes_single_label_candidate(self):
        # it will fail resolution downstream, counting toward invalid
        sequences, failed = parse_candidates("this task is about accounting")
        assert sequences == [["this task is about accounting"]]
        assert failed == 0

    def test_malformed_json_items_counted_as_failures(self):
        sequences, failed = parse_candidates('[["A", "B"], 42, ["", ""]]')
        assert sequences == [["A", "B"]]
        assert failed == 2

    def test_separator_only_line_is_a_failure(self):
        sequences, failed = parse_candidates("> > >")
        assert sequences == []
        assert failed == 1

    def test_format_roundtrip(self):
        sequences = [["A", "B", "C"], ["D", "E", "F"]]
        assert parse_candidates(format_candidates(sequences)) == (sequences, 0)


class TestKeywordAnnotator:
    def test_rules_fire_on_substring_case_insensitive(self):
        annotator = KeywordAnnotator(
            [KeywordRule("budget", ("F", "O", "review budget")),
             KeywordRule("deploy", ("F", "O", "deploy code"))]
        )
        raw = annotator.annotate("Review the BUDGET and deploy it", "")
        sequences, _ = parse_candidates(raw)
        assert sequences == [["F", "O", "review budget"], ["F", "O", "deploy code"]]

    def test_no_hits_yields_empty_array(self):
        annotator = KeywordAnnotator([KeywordRule("zzz", ("a",))])
        assert annotator.annotate("nothing relevant", "") == "[]"

    def test_deterministic(self, domain_annotator):
        first = domain_annotator.annotate("Reconcile bank statements", "whatever")
        second = domain_annotator.annotate("Reconcile bank statements", "other taxonomy")
        assert first == second


class TestReplayAnnotator:
    def test_serves_recorded_output(self):
        annotator = ReplayAnnotator({"do the thing": '[["A","B","C"]]'})
        assert annotator.annotate("do the thing", "") == '[["A","B","C"]]'

    def test_unknown_instruction_is_loud(self):
        annotator = ReplayAnnotator({})
        with pytest.raises(KeyError):
            annotator.annotate("never recorded", "")

    def test_from_records_joins_on_example_key(self, examples_corpus, domain_results):
        annotator = ReplayAnnotator.from_records(examples_corpus, domain_results)
        by_key = {e.key: e for e in examples_corpus}
        for result in domain_results:
            instruction = by_key[result.key].instruction
            assert annotator.annotate(instruction, "") == result.raw_annotator_output


class _Handler(http.server.BaseHTTPRequestHandler):
    fail_times = 0
    reject_times = 0
    requests_seen = 0

    def do_POST(self):
        cls = type(self)
        cls.requests_seen += 1
        length = int(self.headers["Content-Length"])
        payload = json.loads(self.rfile.read(length))
        if cls.reject_times > 0:
            cls.reject_times -= 1
            self.send_response(403)
            self.end_headers()
            return
        if cls.fail_times > 0:
            cls.fail_times -= 1
            self.send_response(500)
            self.end_headers()
            return
        body = json.dumps([["Family One", "Occ One", payload["instruction"]]]).encode()
        self.send_response(200)
        self.send_header("Content-Type", "text/plain")
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture()
def annotator_server():
    server = http.server.HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _Handler.fail_times = 0
    _Handler.reject_times = 0
    _Handler.requests_seen = 0
    yield f"http://127.0.0.1:{server.server_port}/annotate"
    server.shutdown()


class TestRemoteAnnotator:
    def test_requires_endpoint(self, monkeypatch):
        monkeypatch.delenv("ATLAS_ANNOTATOR_URL", raising=False)
        with pytest.raises(ValueError, match="ATLAS_ANNOTATOR_URL"):
            RemoteAnnotator()

    def test_reads_endpoint_from_environment(self, monkeypatch, annotator_server):
        monkeypatch.setenv("ATLAS_ANNOTATOR_URL", annotator_server)
        monkeypatch.setenv("ATLAS_ANNOTATOR_KEY", "sekrit")
        annotator = RemoteAnnotator(sleep=lambda s: None)
        raw = annotator.annotate("task text", "taxonomy text")
        sequences, _ = parse_candidates(raw)
        assert sequences == [["Family One", "Occ One", "task text"]]

    def test_retries_transient_failures_with_backoff(self, annotator_server):
        _Handler.fail_times = 2
        sleeps = []
        annotator = RemoteAnnotator(url=annotator_server, sleep=sleeps.append)
        raw = annotator.annotate("x", "")
        assert "Family One" in raw
        assert _Handler.requests_seen == 3
        assert sleeps == [0.5, 1.0]  # exponential backoff

    def test_exhausted_retries_surface_attempt_count(self, annotator_server):
        _Handler.fail_times = 99
        annotator = RemoteAnnotator(url=annotator_server, sleep=lambda s: None)
        with pytest.raises(AnnotatorTransportError, match="after 3 attempts"):
            annotator.annotate("x", "")

    def test_client_errors_are_not_retried(self, annotator_server):
        _Handler.reject_times = 5
        annotator = RemoteAnnotator(url=annotator_server, sleep=lambda s: None)
        with pytest.raises(AnnotatorTransportError, match="403"):
            annotator.annotate("x", "")
        assert _Handler.requests_seen == 1

    def test_unreachable_endpoint(self):
        annotator = RemoteAnnotator(
            url="http://127.0.0.1:1/nothing", sleep=lambda s: None, timeout=0.2
        )
        with pytest.raises(AnnotatorTransportError):
            annotator.annotate("x", "")
