"""Tokenizer for the Java subset the extractor understands."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class ParseError(Exception):
    def __init__(self, file_path: str, line: int, col: int, message: str):
        super().__init__(f"{file_path}:{line}:{col}: {message}")
        self.file_path = file_path
        self.line = line
        self.col = col


KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

PRIMITIVES = frozenset("boolean byte char double float int long short void".split())

# Multi-character operators, longest first.  '>' is always lexed alone so the
# parser can close nested generics; adjacent '>' tokens are recombined there.
_OPERATORS = [
    "<<=", "...",
    "->", "::", "++", "--", "<<", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "&=", "|=", "^=", "%=",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?", ":",
    ";", ",", ".", "(", ")", "{", "}", "[", "]", "@",
]


class TokenKind(str, Enum):
    IDENT = "ident"
    KEYWORD = "keyword"
    NUMBER = "number"
    STRING = "string"
    CHAR = "char"
    OP = "op"
    EOF = "eof"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    value: str
    line: int
    col: int

    def is_op(self, *values: str) -> bool:
        return self.kind is TokenKind.OP and self.value in values

    def is_kw(self, *values: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.value in values


def tokenize(source: str, file_path: str = "<source>") -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def error(message: str) -> ParseError:
        return ParseError(file_path, line, col, message)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n\f":
            advance(1)
            continue
        if source.startswith("//", i):
            end = source.find("\n", i)
            advance((end - i) if end != -1 else (n - i))
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end == -1:
                raise error("unterminated block comment")
            advance(end + 2 - i)
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch in "_$":
            j = i
            while j < n and (source[j].isalnum() or source[j] in "_$"):
                j += 1
            word = source[i:j]
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, start_line, start_col))
            advance(j - i)
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n:
                c = source[j]
                if c.isalnum() or c in "._":
                    j += 1
                elif c in "+-" and source[j - 1] in "eEpP":
                    j += 1
                else:
                    break
            tokens.append(Token(TokenKind.NUMBER, source[i:j], start_line, start_col))
            advance(j - i)
            continue
        if source.startswith('"""', i):
            end = source.find('"""', i + 3)
            if end == -1:
                raise error("unterminated text block")
            tokens.append(Token(TokenKind.STRING, source[i : end + 3], start_line, start_col))
            advance(end + 3 - i)
            continue
        if ch in "\"'":
            quote = ch
            j = i + 1
            while j < n and source[j] != quote:
                j += 2 if source[j] == "\\" else 1
            if j >= n:
                literal_kind = "string" if quote == '"' else "char"
                raise error(f"unterminated {literal_kind} literal")
            kind = TokenKind.STRING if quote == '"' else TokenKind.CHAR
            tokens.append(Token(kind, source[i : j + 1], start_line, start_col))
            advance(j + 1 - i)
            continue
        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token(TokenKind.OP, op, start_line, start_col))
                advance(len(op))
                break
        else:
            raise error(f"unexpected character {ch!r}")
    tokens.append(Token(TokenKind.EOF, "", line, col))
    return tokens
