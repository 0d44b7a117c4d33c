from __future__ import annotations

import numpy as np
import pytest

from qubofolio.errors import ParseError
from qubofolio.qubo import QuboProblem, load_problem, parse_problem, save_problem

from conftest import random_problem


class TestRoundTrip:
    def test_random_problem(self, rng, tmp_path):
        p = random_problem(rng, 10)
        path = tmp_path / "p.qubo"
        save_problem(p, path)
        q = load_problem(path)
        assert np.max(np.abs(q.quad - p.quad)) <= 1e-15
        assert np.max(np.abs(q.lin - p.lin)) <= 1e-15
        assert q.offset == p.offset

    def test_portfolio_problem(self, toy_problem, tmp_path):
        path = tmp_path / "toy.qubo"
        save_problem(toy_problem, path)
        q = load_problem(path)
        assert np.array_equal(q.quad, toy_problem.quad)
        assert np.array_equal(q.lin, toy_problem.lin)

    def test_written_layout(self, tmp_path):
        p = QuboProblem.from_terms(2, {0: 1.5}, {(0, 1): -2.0, (1, 1): 0.25}, offset=3.0)
        path = tmp_path / "p.qubo"
        save_problem(p, path)
        lines = path.read_text().splitlines()
        assert lines[:2] == ["qubo 2", "offset 3.0"]
        assert "lin 0 1.5" in lines
        assert "quad 0 1 -2.0" in lines
        assert "quad 1 1 0.25" in lines


class TestParse:
    def test_comments_and_blank_lines(self):
        p = parse_problem("# header\nqubo 2\noffset 0\n\nlin 1 -1 # trailing\nquad 0 1 2\n")
        assert p.lin.tolist() == [0.0, -1.0]
        assert p.quad[0, 1] == 2.0

    def test_diagonal_entry_is_monomial(self):
        p = parse_problem("qubo 1\noffset 0\nquad 0 0 3\n")
        assert p.quad[0, 0] == 6.0

    def test_empty_file(self):
        with pytest.raises(ParseError):
            parse_problem("")
        with pytest.raises(ParseError):
            parse_problem("# only a comment\n")

    def test_index_out_of_range_reports_line(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_problem("qubo 2\noffset 0\nquad 0 3 1.0\n")

    @pytest.mark.parametrize(
        "text",
        [
            "qubit 2\noffset 0\n",
            "qubo -1\noffset 0\n",
            "qubo 2\nlin 0 1\n",
            "qubo 2\noffset 0\nlin 0 nan\n",
            "qubo 2\noffset 0\nlin 0\n",
            "qubo 2\noffset 0\nquad 1 0 1\n",
            "qubo 2\noffset 0\ncubic 0 1 1 1\n",
            "qubo 2\noffset x\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_problem(text)
