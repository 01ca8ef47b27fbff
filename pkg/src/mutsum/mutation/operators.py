"""Mutation operators: where each applies and what it may write there.

Operators locate their edit spans through the token stream (never inside
comments or string literals) or through AST node extents.  Each operator
yields ``(site, candidate_fragments)`` pairs; the engine turns a chosen
pair into a full mutant.

The registered rewrites:

* ``flip-comparator``     (decision)  == <-> !=, < <-> >, <= <-> >=
* ``swap-arith-operator`` (decision)  + <-> -, * -> //, / -> //, // -> /
* ``swap-bool-operator``  (decision)  and <-> or
* ``perturb-number``      (value)     literal n -> n+1 | n-1 | n*2
* ``flip-index``          (value)     subscript 0 <-> -1
* ``perturb-string-literal`` (value, opt-in) drop last char / seed "x"
* ``delete-statement``    (statement) remove; sole-statement blocks get ``pass``
* ``duplicate-statement`` (statement) insert a copy on the next line
* ``swap-adjacent-statements`` (statement) exchange two neighboring lines
* ``drop-return-value``   (statement) ``return expr`` -> ``return``
"""

from __future__ import annotations

import ast
import io
import tokenize
from dataclasses import dataclass

from mutsum.mutation.types import MutationSite, MutationType

COMPARATOR_FLIP = {"==": "!=", "!=": "==", "<": ">", ">": "<", "<=": ">=", ">=": "<="}
ARITH_SWAP = {"+": "-", "-": "+", "*": "//", "/": "//", "//": "/"}
BOOL_SWAP = {"and": "or", "or": "and"}

_COMPARE_TOKENS = {
    ast.Eq: "==",
    ast.NotEq: "!=",
    ast.Lt: "<",
    ast.Gt: ">",
    ast.LtE: "<=",
    ast.GtE: ">=",
}
_BINOP_TOKENS = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/", ast.FloorDiv: "//"}

_SIMPLE_STMTS = (
    ast.Expr,
    ast.Assign,
    ast.AugAssign,
    ast.AnnAssign,
    ast.Return,
    ast.Break,
    ast.Continue,
    ast.Raise,
    ast.Assert,
    ast.Delete,
    ast.Global,
    ast.Nonlocal,
    ast.Import,
    ast.ImportFrom,
    ast.Pass,
)
_TERMINAL_STMTS = (ast.Return, ast.Break, ast.Continue, ast.Raise, ast.Pass)


class SourceIndex:
    """Parsed views of one source text shared by every operator."""

    def __init__(self, source: str):
        self.source = source
        self.tree = ast.parse(source)
        self.lines = source.splitlines()
        self.line_offsets = [0]
        pos = 0
        for line in source.splitlines(keepends=True):
            pos += len(line)
            self.line_offsets.append(pos)
        self.op_tokens = [
            tok
            for tok in tokenize.generate_tokens(io.StringIO(source).readline)
            if tok.type in (tokenize.OP, tokenize.NAME)
        ]

    def char_col(self, line: int, byte_col: int) -> int:
        """AST columns are utf-8 byte offsets; convert to character offsets."""
        text = self.lines[line - 1]
        return len(text.encode("utf-8")[:byte_col].decode("utf-8", errors="ignore"))

    def node_span(self, node: ast.AST) -> tuple[int, int, int, int]:
        """(line, col_start, end_line, col_end) of a node in char columns."""
        return (
            node.lineno,
            self.char_col(node.lineno, node.col_offset),
            node.end_lineno,
            self.char_col(node.end_lineno, node.end_col_offset),
        )

    def abs_offset(self, line: int, col: int) -> int:
        return self.line_offsets[line - 1] + col

    def text_at(self, line: int, col_start: int, end_line: int, col_end: int) -> str:
        return self.source[self.abs_offset(line, col_start):self.abs_offset(end_line, col_end)]

    def find_token(
        self, wanted: str, after: tuple[int, int], before: tuple[int, int]
    ) -> tuple[int, int] | None:
        """First token equal to ``wanted`` strictly between two positions."""
        for tok in self.op_tokens:
            if tok.start >= after and tok.end <= before and tok.string == wanted:
                return tok.start
        return None

    def docstring_stmts(self) -> set[tuple[int, int]]:
        spans = set()
        for node in ast.walk(self.tree):
            if isinstance(node, (ast.Module, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                body = node.body
                if body and isinstance(body[0], ast.Expr):
                    value = body[0].value
                    if isinstance(value, ast.Constant) and isinstance(value.value, str):
                        spans.add((body[0].lineno, body[0].col_offset))
        return spans


SitePair = tuple[MutationSite, list[str]]


def _single_line_site(
    index: SourceIndex, operator_id: str, line: int, col_start: int, col_end: int
) -> MutationSite:
    return MutationSite(
        operator_id=operator_id,
        line=line,
        col_start=col_start,
        col_end=col_end,
        original_fragment=index.text_at(line, col_start, line, col_end),
        end_line=line,
    )


# ---------------------------------------------------------------------------
# Decision operators
# ---------------------------------------------------------------------------

def _token_swap_sites(
    index: SourceIndex, operator_id: str, mapping: dict[str, str]
) -> list[SitePair]:
    pairs: list[SitePair] = []
    for node in ast.walk(index.tree):
        if isinstance(node, ast.Compare) and operator_id == "flip-comparator":
            prev = node.left
            for op, comparator in zip(node.ops, node.comparators):
                token = _COMPARE_TOKENS.get(type(op))
                if token is not None:
                    pairs.extend(_between(index, operator_id, mapping, token, prev, comparator))
                prev = comparator
        elif isinstance(node, ast.BinOp) and operator_id == "swap-arith-operator":
            token = _BINOP_TOKENS.get(type(node.op))
            if token is not None:
                pairs.extend(_between(index, operator_id, mapping, token, node.left, node.right))
        elif isinstance(node, ast.BoolOp) and operator_id == "swap-bool-operator":
            token = "and" if isinstance(node.op, ast.And) else "or"
            for left, right in zip(node.values, node.values[1:]):
                pairs.extend(_between(index, operator_id, mapping, token, left, right))
    return pairs


def _between(
    index: SourceIndex,
    operator_id: str,
    mapping: dict[str, str],
    token: str,
    left: ast.AST,
    right: ast.AST,
) -> list[SitePair]:
    _, _, left_end_line, left_end_col = index.node_span(left)
    right_line, right_col, _, _ = index.node_span(right)
    found = index.find_token(token, (left_end_line, left_end_col), (right_line, right_col))
    if found is None:
        return []
    line, col = found
    site = _single_line_site(index, operator_id, line, col, col + len(token))
    return [(site, [mapping[token]])]


def flip_comparator_sites(index: SourceIndex) -> list[SitePair]:
    return _token_swap_sites(index, "flip-comparator", COMPARATOR_FLIP)


def swap_arith_sites(index: SourceIndex) -> list[SitePair]:
    return _token_swap_sites(index, "swap-arith-operator", ARITH_SWAP)


def swap_bool_sites(index: SourceIndex) -> list[SitePair]:
    return _token_swap_sites(index, "swap-bool-operator", BOOL_SWAP)


# ---------------------------------------------------------------------------
# Value operators
# ---------------------------------------------------------------------------

def _number_candidates(value: int | float) -> list[str]:
    raw = [value + 1, value - 1, value * 2]
    out: list[str] = []
    for candidate in raw:
        if candidate == value:
            continue
        text = repr(candidate)
        try:
            ast.literal_eval(text)
        except (ValueError, SyntaxError, OverflowError):
            continue
        if text not in out:
            out.append(text)
    return out


def perturb_number_sites(index: SourceIndex) -> list[SitePair]:
    pairs: list[SitePair] = []
    for node in ast.walk(index.tree):
        if not isinstance(node, ast.Constant):
            continue
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            continue
        if node.lineno != node.end_lineno:
            continue
        line, col_start, _, col_end = index.node_span(node)
        candidates = _number_candidates(node.value)
        if not candidates:
            continue
        site = _single_line_site(index, "perturb-number", line, col_start, col_end)
        pairs.append((site, candidates))
    return pairs


def flip_index_sites(index: SourceIndex) -> list[SitePair]:
    pairs: list[SitePair] = []
    for node in ast.walk(index.tree):
        if not isinstance(node, ast.Subscript):
            continue
        slice_expr = node.slice
        target: ast.AST | None = None
        replacement: str | None = None
        if (
            isinstance(slice_expr, ast.Constant)
            and slice_expr.value == 0
            and not isinstance(slice_expr.value, bool)
        ):
            target, replacement = slice_expr, "-1"
        elif (
            isinstance(slice_expr, ast.UnaryOp)
            and isinstance(slice_expr.op, ast.USub)
            and isinstance(slice_expr.operand, ast.Constant)
            and slice_expr.operand.value == 1
        ):
            target, replacement = slice_expr, "0"
        if target is None or target.lineno != target.end_lineno:
            continue
        line, col_start, _, col_end = index.node_span(target)
        site = _single_line_site(index, "flip-index", line, col_start, col_end)
        pairs.append((site, [replacement]))
    return pairs


def perturb_string_sites(index: SourceIndex) -> list[SitePair]:
    """Opt-in string-literal perturbation (see ``enumerate_sites`` flag)."""
    docstrings = index.docstring_stmts()
    excluded: set[int] = set()
    for node in ast.walk(index.tree):
        if isinstance(node, ast.JoinedStr):
            for child in ast.walk(node):
                excluded.add(id(child))
        elif isinstance(node, ast.Expr) and (node.lineno, node.col_offset) in docstrings:
            excluded.add(id(node.value))
    pairs: list[SitePair] = []
    for node in ast.walk(index.tree):
        if not isinstance(node, ast.Constant) or not isinstance(node.value, str):
            continue
        if id(node) in excluded or node.lineno != node.end_lineno:
            continue
        content = node.value
        text = repr(content[:-1] if content else "x")
        line, col_start, _, col_end = index.node_span(node)
        site = _single_line_site(index, "perturb-string-literal", line, col_start, col_end)
        if text != site.original_fragment:
            pairs.append((site, [text]))
    return pairs


# ---------------------------------------------------------------------------
# Statement operators
# ---------------------------------------------------------------------------

@dataclass
class _StmtInfo:
    stmt: ast.stmt
    block: list[ast.stmt]
    index_in_block: int
    starts_line: bool
    shares_line: bool
    is_docstring: bool


def _collect_statements(index: SourceIndex) -> list[_StmtInfo]:
    docstrings = index.docstring_stmts()
    infos: list[_StmtInfo] = []
    for node in ast.walk(index.tree):
        for attr in ("body", "orelse", "finalbody"):
            block = getattr(node, attr, None)
            if not isinstance(block, list) or not block:
                continue
            if not all(isinstance(s, ast.stmt) for s in block):
                continue
            for position, stmt in enumerate(block):
                if not isinstance(stmt, _SIMPLE_STMTS) or stmt.lineno != stmt.end_lineno:
                    continue
                line, col_start, _, _ = index.node_span(stmt)
                starts_line = index.lines[line - 1][:col_start].strip() == ""
                shares = any(
                    other is not stmt
                    and other.lineno <= stmt.end_lineno
                    and other.end_lineno >= stmt.lineno
                    for other in block
                )
                infos.append(
                    _StmtInfo(
                        stmt=stmt,
                        block=block,
                        index_in_block=position,
                        starts_line=starts_line,
                        shares_line=shares,
                        is_docstring=(stmt.lineno, stmt.col_offset) in docstrings,
                    )
                )
    return infos


def _stmt_site(index: SourceIndex, operator_id: str, stmt: ast.stmt) -> MutationSite:
    line, col_start, _, col_end = index.node_span(stmt)
    return _single_line_site(index, operator_id, line, col_start, col_end)


def delete_statement_sites(index: SourceIndex) -> list[SitePair]:
    pairs: list[SitePair] = []
    for info in _collect_statements(index):
        if info.is_docstring or info.shares_line or isinstance(info.stmt, ast.Pass):
            continue
        replacement = "pass" if len(info.block) == 1 else ""
        site = _stmt_site(index, "delete-statement", info.stmt)
        pairs.append((site, [replacement]))
    return pairs


def duplicate_statement_sites(index: SourceIndex) -> list[SitePair]:
    pairs: list[SitePair] = []
    for info in _collect_statements(index):
        if (
            info.is_docstring
            or info.shares_line
            or not info.starts_line
            or isinstance(info.stmt, _TERMINAL_STMTS)
        ):
            continue
        site = _stmt_site(index, "duplicate-statement", info.stmt)
        line, col_start, _, _ = index.node_span(info.stmt)
        indent = index.lines[line - 1][:col_start]
        text = site.original_fragment
        pairs.append((site, [f"{text}\n{indent}{text}"]))
    return pairs


def swap_adjacent_sites(index: SourceIndex) -> list[SitePair]:
    pairs: list[SitePair] = []
    infos = _collect_statements(index)
    by_stmt = {id(info.stmt): info for info in infos}
    for info in infos:
        nxt = (
            info.block[info.index_in_block + 1]
            if info.index_in_block + 1 < len(info.block)
            else None
        )
        if nxt is None:
            continue
        next_info = by_stmt.get(id(nxt))
        if next_info is None:
            continue
        if info.is_docstring or next_info.is_docstring:
            continue
        if info.shares_line or next_info.shares_line:
            continue
        if not info.starts_line or not next_info.starts_line:
            continue
        if nxt.lineno != info.stmt.end_lineno + 1:
            continue
        line_a, col_a, _, col_a_end = index.node_span(info.stmt)
        line_b, col_b, _, col_b_end = index.node_span(nxt)
        text_a = index.text_at(line_a, col_a, line_a, col_a_end)
        text_b = index.text_at(line_b, col_b, line_b, col_b_end)
        if text_a == text_b:
            continue
        original = index.text_at(line_a, col_a, line_b, col_b_end)
        separator = index.text_at(line_a, col_a_end, line_b, col_b)
        site = MutationSite(
            operator_id="swap-adjacent-statements",
            line=line_a,
            col_start=col_a,
            col_end=col_b_end,
            original_fragment=original,
            end_line=line_b,
        )
        pairs.append((site, [f"{text_b}{separator}{text_a}"]))
    return pairs


def drop_return_value_sites(index: SourceIndex) -> list[SitePair]:
    pairs: list[SitePair] = []
    for node in ast.walk(index.tree):
        if not isinstance(node, ast.Return) or node.value is None:
            continue
        if node.lineno != node.end_lineno:
            continue
        site = _stmt_site(index, "drop-return-value", node)
        pairs.append((site, ["return"]))
    return pairs


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Operator:
    id: str
    mutation_type: MutationType
    collect: callable
    opt_in: bool = False


OPERATORS: dict[str, Operator] = {
    op.id: op
    for op in [
        Operator("flip-comparator", MutationType.DECISION, flip_comparator_sites),
        Operator("swap-arith-operator", MutationType.DECISION, swap_arith_sites),
        Operator("swap-bool-operator", MutationType.DECISION, swap_bool_sites),
        Operator("perturb-number", MutationType.VALUE, perturb_number_sites),
        Operator("flip-index", MutationType.VALUE, flip_index_sites),
        Operator("perturb-string-literal", MutationType.VALUE, perturb_string_sites, opt_in=True),
        Operator("delete-statement", MutationType.STATEMENT, delete_statement_sites),
        Operator("duplicate-statement", MutationType.STATEMENT, duplicate_statement_sites),
        Operator("swap-adjacent-statements", MutationType.STATEMENT, swap_adjacent_sites),
        Operator("drop-return-value", MutationType.STATEMENT, drop_return_value_sites),
    ]
}


def collect_pairs(
    index: SourceIndex, mutation_type: MutationType, include_string_literals: bool = False
) -> list[SitePair]:
    """All (site, candidates) pairs of one mutation type, in document order."""
    pairs: list[SitePair] = []
    for operator in OPERATORS.values():
        if operator.mutation_type is not mutation_type:
            continue
        if operator.opt_in and not include_string_literals:
            continue
        pairs.extend(operator.collect(index))
    pairs.sort(key=lambda pair: (pair[0].sort_key(), pair[1]))
    return pairs
