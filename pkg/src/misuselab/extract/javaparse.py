"""Lightweight Java parser geared towards usage extraction.

Parses compilation units into class/method/statement/expression trees that
carry exactly what the model builder needs: declarations, control structure,
call sites and null comparisons.  It is not a conformance-grade front end;
constructs it cannot digest inside a method body surface as
``MethodBodyError`` so the caller can skip that one method.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .javalex import PRIMITIVES, ParseError, Token, TokenKind, tokenize


class MethodBodyError(Exception):
    """A single method body could not be parsed; the file itself is fine."""


# --- expression nodes -------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Name(Expr):
    parts: tuple[str, ...]
    line: int

    @property
    def dotted(self) -> str:
        return ".".join(self.parts)


@dataclass(frozen=True)
class Literal(Expr):
    value: str  # "null", a number, a string, "true", "false", ...
    line: int


@dataclass(frozen=True)
class Call(Expr):
    receiver: Expr | None  # None: implicit this / static import
    name: str
    args: tuple[Expr, ...]
    line: int


@dataclass(frozen=True)
class New(Expr):
    type_name: str
    args: tuple[Expr, ...]
    line: int
    anonymous_body: tuple["MethodDecl", ...] = ()
    is_array: bool = False


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Assign(Expr):
    target: Expr
    op: str
    value: Expr


@dataclass(frozen=True)
class Ternary(Expr):
    condition: Expr
    when_true: Expr
    when_false: Expr


@dataclass(frozen=True)
class Cast(Expr):
    type_name: str
    operand: Expr


@dataclass(frozen=True)
class ArrayAccess(Expr):
    array: Expr
    index: Expr


@dataclass(frozen=True)
class InstanceOf(Expr):
    operand: Expr
    type_name: str


@dataclass(frozen=True)
class FieldAccess(Expr):
    receiver: Expr
    name: str
    line: int


@dataclass(frozen=True)
class Lambda(Expr):
    line: int  # body is deliberately not represented


@dataclass(frozen=True)
class MethodRef(Expr):
    line: int


# --- statement nodes --------------------------------------------------------


@dataclass(frozen=True)
class Stmt:
    pass


@dataclass(frozen=True)
class Block(Stmt):
    statements: tuple[Stmt, ...]


@dataclass(frozen=True)
class LocalDecl(Stmt):
    type_name: str
    declarators: tuple[tuple[str, Expr | None], ...]
    line: int


@dataclass(frozen=True)
class ExprStmt(Stmt):
    expr: Expr


@dataclass(frozen=True)
class If(Stmt):
    condition: Expr
    then_branch: Stmt
    else_branch: Stmt | None


@dataclass(frozen=True)
class While(Stmt):
    condition: Expr
    body: Stmt


@dataclass(frozen=True)
class DoWhile(Stmt):
    body: Stmt
    condition: Expr


@dataclass(frozen=True)
class ForClassic(Stmt):
    init: tuple[Stmt, ...]
    condition: Expr | None
    update: tuple[Expr, ...]
    body: Stmt


@dataclass(frozen=True)
class ForEach(Stmt):
    var_type: str
    var_name: str
    iterable: Expr
    body: Stmt


@dataclass(frozen=True)
class CatchClause(Stmt):
    exception_types: tuple[str, ...]
    var_name: str
    body: Block


@dataclass(frozen=True)
class Try(Stmt):
    resources: tuple[LocalDecl, ...]
    body: Block
    catches: tuple[CatchClause, ...]
    finally_block: Block | None


@dataclass(frozen=True)
class SwitchCase(Stmt):
    statements: tuple[Stmt, ...]


@dataclass(frozen=True)
class Switch(Stmt):
    selector: Expr
    cases: tuple[SwitchCase, ...]


@dataclass(frozen=True)
class Return(Stmt):
    expr: Expr | None


@dataclass(frozen=True)
class Throw(Stmt):
    expr: Expr


@dataclass(frozen=True)
class Synchronized(Stmt):
    monitor: Expr
    body: Block


@dataclass(frozen=True)
class SimpleStmt(Stmt):
    exprs: tuple[Expr, ...] = ()  # break/continue/assert/empty


# --- declarations -----------------------------------------------------------


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[tuple[str, str], ...]  # (type, name)
    body: Block | None
    line: int
    is_constructor: bool = False
    body_error: str | None = None


@dataclass
class ClassDecl:
    name: str
    fields: dict[str, str] = field(default_factory=dict)  # field name -> type
    methods: list[MethodDecl] = field(default_factory=list)
    nested: list["ClassDecl"] = field(default_factory=list)


_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "&=", "|=", "^=", "%=", "<<="}
_STMT_KEYWORDS = {
    "if", "while", "do", "for", "try", "switch", "return", "throw", "break",
    "continue", "synchronized", "assert", "else", "case", "default", "catch",
    "finally", "new", "this", "super",
}


class _Parser:
    def __init__(self, tokens: list[Token], file_path: str):
        self.tokens = tokens
        self.file_path = file_path
        self.pos = 0

    # -- cursor helpers --

    def peek(self, offset: int = 0) -> Token:
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def next(self) -> Token:
        token = self.peek()
        if token.kind is not TokenKind.EOF:
            self.pos += 1
        return token

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.peek()
        return ParseError(self.file_path, token.line, token.col, message)

    def expect_op(self, value: str) -> Token:
        token = self.peek()
        if not token.is_op(value):
            raise self.error(f"expected {value!r}, found {token.value!r}")
        return self.next()

    def accept_op(self, value: str) -> bool:
        if self.peek().is_op(value):
            self.next()
            return True
        return False

    def skip_balanced(self, open_op: str, close_op: str) -> None:
        depth = 0
        while True:
            token = self.next()
            if token.kind is TokenKind.EOF:
                raise self.error(f"unbalanced {open_op!r}")
            if token.is_op(open_op):
                depth += 1
            elif token.is_op(close_op):
                depth -= 1
                if depth == 0:
                    return

    def skip_annotations_and_modifiers(self) -> None:
        while True:
            token = self.peek()
            if token.is_op("@"):
                self.next()
                self.next()  # annotation name (possibly first of a dotted name)
                while self.accept_op("."):
                    self.next()
                if self.peek().is_op("("):
                    self.skip_balanced("(", ")")
                continue
            if token.is_kw(
                "public", "private", "protected", "static", "final", "abstract",
                "synchronized", "native", "strictfp", "transient", "volatile", "default",
            ):
                self.next()
                continue
            return

    # -- types --

    def try_parse_type(self, consume_array_dims: bool = True) -> str | None:
        """Parse a type reference; returns its name without generics/dims."""
        start = self.pos
        token = self.peek()
        if token.is_kw(*PRIMITIVES):
            self.next()
            name = token.value
        elif token.kind is TokenKind.IDENT:
            self.next()
            name = token.value
            while self.peek().is_op(".") and self.peek(1).kind is TokenKind.IDENT:
                self.next()
                name = self.next().value  # keep the simple (last) segment
        else:
            return None
        if self.peek().is_op("<") and not self._skip_type_arguments():
            self.pos = start
            return None
        while consume_array_dims and self.peek().is_op("[") and self.peek(1).is_op("]"):
            self.next()
            self.next()
        if self.peek().is_op("..."):  # varargs
            self.next()
        return name

    def _skip_type_arguments(self) -> bool:
        start = self.pos
        depth = 0
        while True:
            token = self.next()
            if token.kind is TokenKind.EOF:
                self.pos = start
                return False
            if token.is_op("<"):
                depth += 1
            elif token.is_op(">"):
                depth -= 1
                if depth == 0:
                    return True
            elif token.is_op("(", ")", "{", "}", ";") or token.is_op("&&", "||"):
                self.pos = start
                return False

    # -- compilation unit --

    def parse_compilation_unit(self) -> list[ClassDecl]:
        classes: list[ClassDecl] = []
        while self.peek().kind is not TokenKind.EOF:
            self.skip_annotations_and_modifiers()
            token = self.peek()
            if token.is_kw("package") or token.is_kw("import"):
                while not self.next().is_op(";"):
                    if self.peek().kind is TokenKind.EOF:
                        raise self.error("unterminated package/import")
                continue
            if token.is_kw("class", "interface", "enum"):
                classes.append(self.parse_class())
                continue
            if token.is_op(";"):
                self.next()
                continue
            raise self.error(f"unexpected top-level token {token.value!r}")
        if not classes:
            raise self.error("no type declaration found")
        return classes

    def parse_class(self) -> ClassDecl:
        keyword = self.next()  # class / interface / enum
        name_token = self.next()
        if name_token.kind is not TokenKind.IDENT:
            raise self.error("expected type name", name_token)
        decl = ClassDecl(name=name_token.value)
        if self.peek().is_op("<"):
            if not self._skip_type_arguments():
                raise self.error("unbalanced type parameters")
        while not self.peek().is_op("{"):
            if self.peek().kind is TokenKind.EOF:
                raise self.error("expected class body")
            self.next()  # extends/implements clauses
        self.expect_op("{")
        if keyword.value == "enum":
            self._skip_enum_constants()
        self.parse_class_body(decl)
        return decl

    def _skip_enum_constants(self) -> None:
        # Consume constants (with optional argument lists and bodies) up to
        # the member separator ';' or the closing brace.
        while True:
            token = self.peek()
            if token.kind is TokenKind.EOF:
                raise self.error("unterminated enum body")
            if token.is_op(";"):
                self.next()
                return
            if token.is_op("}"):
                return
            if token.is_op("("):
                self.skip_balanced("(", ")")
            elif token.is_op("{"):
                self.skip_balanced("{", "}")
            else:
                self.next()

    def parse_class_body(self, decl: ClassDecl) -> None:
        while True:
            if self.accept_op("}"):
                return
            if self.peek().kind is TokenKind.EOF:
                raise self.error("unterminated class body")
            self.parse_member(decl)

    def parse_member(self, decl: ClassDecl) -> None:
        self.skip_annotations_and_modifiers()
        token = self.peek()
        if token.is_op(";"):
            self.next()
            return
        if token.is_op("{"):  # instance or static initializer: skip
            self.skip_balanced("{", "}")
            return
        if token.is_kw("class", "interface", "enum"):
            decl.nested.append(self.parse_class())
            return
        # Constructor: Name '('
        if (
            token.kind is TokenKind.IDENT
            and token.value == decl.name
            and self.peek(1).is_op("(")
        ):
            self.next()
            decl.methods.append(self.parse_method_rest(token.value, token.line, True))
            return
        if self.peek().is_op("<"):  # method type parameters
            if not self._skip_type_arguments():
                raise self.error("unbalanced member type parameters")
        start = self.pos
        type_name = self.try_parse_type()
        if type_name is None:
            raise self.error(f"cannot parse member starting at {token.value!r}")
        name_token = self.peek()
        if name_token.kind is not TokenKind.IDENT:
            raise self.error(f"expected member name, found {name_token.value!r}")
        self.next()
        if self.peek().is_op("("):
            decl.methods.append(self.parse_method_rest(name_token.value, name_token.line, False))
            return
        # Field declaration(s).
        self.pos = start
        field_decl = self.parse_local_decl(require_semicolon=True)
        for field_name, _ in field_decl.declarators:
            decl.fields[field_name] = field_decl.type_name

    def parse_method_rest(self, name: str, line: int, is_constructor: bool) -> MethodDecl:
        params = self.parse_parameters()
        while not self.peek().is_op("{", ";"):
            if self.peek().kind is TokenKind.EOF:
                raise self.error("expected method body")
            self.next()  # throws clause etc.
        if self.accept_op(";"):
            return MethodDecl(name, params, None, line, is_constructor)
        body_start = self.pos
        try:
            body = self.parse_block()
            return MethodDecl(name, params, body, line, is_constructor)
        except ParseError as exc:
            # Per-method resilience: skip this body, keep parsing the file.
            self.pos = body_start
            self.skip_balanced("{", "}")
            return MethodDecl(name, params, None, line, is_constructor, body_error=str(exc))

    def parse_parameters(self) -> tuple[tuple[str, str], ...]:
        self.expect_op("(")
        params: list[tuple[str, str]] = []
        if self.accept_op(")"):
            return tuple(params)
        while True:
            self.skip_annotations_and_modifiers()
            if self.peek().is_kw("final"):
                self.next()
            type_name = self.try_parse_type()
            if type_name is None:
                raise self.error("cannot parse parameter type")
            name_token = self.next()
            if name_token.kind is not TokenKind.IDENT:
                raise self.error("expected parameter name", name_token)
            while self.peek().is_op("[") :
                self.next()
                self.expect_op("]")
            params.append((type_name, name_token.value))
            if self.accept_op(")"):
                return tuple(params)
            self.expect_op(",")

    # -- statements --

    def parse_block(self) -> Block:
        self.expect_op("{")
        statements: list[Stmt] = []
        while not self.accept_op("}"):
            if self.peek().kind is TokenKind.EOF:
                raise self.error("unterminated block")
            statements.append(self.parse_statement())
        return Block(tuple(statements))

    def parse_statement(self) -> Stmt:
        token = self.peek()
        if token.is_op("{"):
            return self.parse_block()
        if token.is_op(";"):
            self.next()
            return SimpleStmt()
        if token.is_op("@") or token.is_kw("final"):
            self.skip_annotations_and_modifiers()
            if self.peek().is_kw("final"):
                self.next()
            return self.parse_local_decl(require_semicolon=True)
        if token.is_kw("if"):
            return self.parse_if()
        if token.is_kw("while"):
            self.next()
            self.expect_op("(")
            condition = self.parse_expression()
            self.expect_op(")")
            return While(condition, self.parse_statement())
        if token.is_kw("do"):
            self.next()
            body = self.parse_statement()
            if not self.peek().is_kw("while"):
                raise self.error("expected 'while' after do body")
            self.next()
            self.expect_op("(")
            condition = self.parse_expression()
            self.expect_op(")")
            self.expect_op(";")
            return DoWhile(body, condition)
        if token.is_kw("for"):
            return self.parse_for()
        if token.is_kw("try"):
            return self.parse_try()
        if token.is_kw("switch"):
            return self.parse_switch()
        if token.is_kw("return"):
            self.next()
            expr = None if self.peek().is_op(";") else self.parse_expression()
            self.expect_op(";")
            return Return(expr)
        if token.is_kw("throw"):
            self.next()
            expr = self.parse_expression()
            self.expect_op(";")
            return Throw(expr)
        if token.is_kw("break", "continue"):
            self.next()
            if self.peek().kind is TokenKind.IDENT:
                self.next()
            self.expect_op(";")
            return SimpleStmt()
        if token.is_kw("assert"):
            self.next()
            exprs = [self.parse_expression()]
            if self.accept_op(":"):
                exprs.append(self.parse_expression())
            self.expect_op(";")
            return SimpleStmt(tuple(exprs))
        if token.is_kw("synchronized"):
            self.next()
            self.expect_op("(")
            monitor = self.parse_expression()
            self.expect_op(")")
            return Synchronized(monitor, self.parse_block())
        if (
            token.kind is TokenKind.IDENT
            and self.peek(1).is_op(":")
            and not self.peek(2).is_op(":")
        ):
            self.next()
            self.next()
            return self.parse_statement()  # labeled statement
        local = self.try_parse_local_decl()
        if local is not None:
            return local
        expr = self.parse_expression()
        self.expect_op(";")
        return ExprStmt(expr)

    def parse_if(self) -> If:
        self.next()
        self.expect_op("(")
        condition = self.parse_expression()
        self.expect_op(")")
        then_branch = self.parse_statement()
        else_branch = None
        if self.peek().is_kw("else"):
            self.next()
            else_branch = self.parse_statement()
        return If(condition, then_branch, else_branch)

    def parse_for(self) -> Stmt:
        self.next()
        self.expect_op("(")
        # Enhanced for: [final] Type name : expr
        start = self.pos
        if self.peek().is_kw("final"):
            self.next()
        var_type = self.try_parse_type()
        if (
            var_type is not None
            and self.peek().kind is TokenKind.IDENT
            and self.peek(1).is_op(":")
        ):
            var_name = self.next().value
            self.next()  # ':'
            iterable = self.parse_expression()
            self.expect_op(")")
            return ForEach(var_type, var_name, iterable, self.parse_statement())
        self.pos = start
        init: tuple[Stmt, ...] = ()
        if not self.accept_op(";"):
            local = self.try_parse_local_decl()
            if local is not None:
                init = (local,)
            else:
                exprs = [self.parse_expression()]
                while self.accept_op(","):
                    exprs.append(self.parse_expression())
                self.expect_op(";")
                init = tuple(ExprStmt(e) for e in exprs)
        condition = None if self.peek().is_op(";") else self.parse_expression()
        self.expect_op(";")
        update: list[Expr] = []
        if not self.peek().is_op(")"):
            update.append(self.parse_expression())
            while self.accept_op(","):
                update.append(self.parse_expression())
        self.expect_op(")")
        return ForClassic(init, condition, tuple(update), self.parse_statement())

    def parse_try(self) -> Try:
        self.next()
        resources: list[LocalDecl] = []
        if self.accept_op("("):
            while not self.accept_op(")"):
                if self.peek().is_kw("final"):
                    self.next()
                resources.append(self.parse_local_decl(require_semicolon=False))
                self.accept_op(";")
        body = self.parse_block()
        catches: list[CatchClause] = []
        finally_block = None
        while self.peek().is_kw("catch"):
            self.next()
            self.expect_op("(")
            if self.peek().is_kw("final"):
                self.next()
            types = []
            type_name = self.try_parse_type()
            if type_name is None:
                raise self.error("cannot parse catch type")
            types.append(type_name)
            while self.accept_op("|"):
                extra = self.try_parse_type()
                if extra is None:
                    raise self.error("cannot parse multi-catch type")
                types.append(extra)
            name_token = self.next()
            if name_token.kind is not TokenKind.IDENT:
                raise self.error("expected catch variable", name_token)
            self.expect_op(")")
            catches.append(CatchClause(tuple(types), name_token.value, self.parse_block()))
        if self.peek().is_kw("finally"):
            self.next()
            finally_block = self.parse_block()
        if not resources and not catches and finally_block is None:
            raise self.error("try without catch, finally or resources")
        return Try(tuple(resources), body, tuple(catches), finally_block)

    def parse_switch(self) -> Switch:
        self.next()
        self.expect_op("(")
        selector = self.parse_expression()
        self.expect_op(")")
        self.expect_op("{")
        cases: list[SwitchCase] = []
        current: list[Stmt] | None = None
        while not self.accept_op("}"):
            token = self.peek()
            if token.kind is TokenKind.EOF:
                raise self.error("unterminated switch")
            if token.is_kw("case", "default"):
                if current:
                    cases.append(SwitchCase(tuple(current)))
                current = []
                self.next()
                if token.value == "case":
                    # Labels may be constants or qualified names; scan to the
                    # separator, tolerating commas between labels.
                    while not self.peek().is_op(":", "->"):
                        if self.peek().kind is TokenKind.EOF:
                            raise self.error("unterminated case label")
                        self.next()
                arrow = self.peek().is_op("->")
                self.next()  # ':' or '->'
                if arrow:
                    current.append(self.parse_statement())
                    cases.append(SwitchCase(tuple(current)))
                    current = []
                continue
            if current is None:
                raise self.error("statement before first case label")
            current.append(self.parse_statement())
        if current:
            cases.append(SwitchCase(tuple(current)))
        return Switch(selector, tuple(cases))

    def try_parse_local_decl(self) -> LocalDecl | None:
        start = self.pos
        try:
            return self.parse_local_decl(require_semicolon=True)
        except ParseError:
            self.pos = start
            return None

    def parse_local_decl(self, require_semicolon: bool) -> LocalDecl:
        line = self.peek().line
        if self.peek().is_kw("final"):
            self.next()
        token = self.peek()
        if token.kind is TokenKind.IDENT and token.value == "var":
            self.next()
            type_name = "var"
        else:
            maybe = self.try_parse_type()
            if maybe is None:
                raise self.error("not a declaration")
            type_name = maybe
        declarators: list[tuple[str, Expr | None]] = []
        while True:
            name_token = self.peek()
            if name_token.kind is not TokenKind.IDENT:
                raise self.error("expected variable name", name_token)
            self.next()
            while self.peek().is_op("["):
                self.next()
                self.expect_op("]")
            init = None
            if self.accept_op("="):
                init = self.parse_expression()
            declarators.append((name_token.value, init))
            if self.accept_op(","):
                continue
            break
        if require_semicolon:
            self.expect_op(";")
        elif self.peek().is_op(";"):
            pass  # caller consumes
        if not declarators:
            raise self.error("declaration without declarators")
        return LocalDecl(type_name, tuple(declarators), line)

    # -- expressions --

    def parse_expression(self) -> Expr:
        return self.parse_assignment()

    def parse_assignment(self) -> Expr:
        if self._looks_like_lambda():
            return self._parse_lambda()
        left = self.parse_ternary()
        token = self.peek()
        if token.kind is TokenKind.OP and token.value in _ASSIGN_OPS:
            self.next()
            right = self.parse_assignment()
            return Assign(left, token.value, right)
        # '>>=' / '>>>=' arrive as '>' '>' '=' because '>' is lexed alone.
        if token.is_op(">") and self.peek(1).is_op(">"):
            save = self.pos
            self.next()
            self.next()
            self.accept_op(">")
            if self.accept_op("="):
                right = self.parse_assignment()
                return Assign(left, ">>=", right)
            self.pos = save
        return left

    def _looks_like_lambda(self) -> bool:
        token = self.peek()
        if token.kind is TokenKind.IDENT and self.peek(1).is_op("->"):
            return True
        if token.is_op("("):
            depth = 0
            offset = 0
            while True:
                t = self.peek(offset)
                if t.kind is TokenKind.EOF:
                    return False
                if t.is_op("("):
                    depth += 1
                elif t.is_op(")"):
                    depth -= 1
                    if depth == 0:
                        return self.peek(offset + 1).is_op("->")
                offset += 1
                if offset > 64:
                    return False
        return False

    def _parse_lambda(self) -> Lambda:
        line = self.peek().line
        if self.peek().is_op("("):
            self.skip_balanced("(", ")")
        else:
            self.next()
        self.expect_op("->")
        if self.peek().is_op("{"):
            self.skip_balanced("{", "}")
        else:
            self.parse_ternary()  # expression body: parsed but discarded
        return Lambda(line)

    def parse_ternary(self) -> Expr:
        condition = self.parse_binary(0)
        if self.accept_op("?"):
            when_true = self.parse_expression()
            self.expect_op(":")
            when_false = self.parse_expression()
            return Ternary(condition, when_true, when_false)
        return condition

    _BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
        ("||",),
        ("&&",),
        ("|",),
        ("^",),
        ("&",),
        ("==", "!="),
        ("<", ">", "<=", ">=", "instanceof"),
        ("<<", ">>", ">>>"),
        ("+", "-"),
        ("*", "/", "%"),
    )

    def parse_binary(self, level: int) -> Expr:
        if level >= len(self._BINARY_LEVELS):
            return self.parse_unary()
        ops = self._BINARY_LEVELS[level]
        left = self.parse_binary(level + 1)
        while True:
            token = self.peek()
            if "instanceof" in ops and token.is_kw("instanceof"):
                self.next()
                type_name = self.try_parse_type()
                if type_name is None:
                    raise self.error("expected type after instanceof")
                if self.peek().kind is TokenKind.IDENT:
                    self.next()  # pattern variable
                left = InstanceOf(left, type_name)
                continue
            op = self._match_binary_op(ops)
            if op is None:
                return left
            right = self.parse_binary(level + 1)
            left = Binary(op, left, right)

    def _match_binary_op(self, ops: tuple[str, ...]) -> str | None:
        token = self.peek()
        if token.kind is not TokenKind.OP:
            return None
        if ">>" in ops and token.is_op(">") and self._adjacent_gt(1):
            if self._adjacent_gt(2):
                self.next(), self.next(), self.next()
                return ">>>"
            # '>' '>' could close nested generics; only treat as shift when
            # followed by something an expression can start with.
            if self.peek(2).kind in (TokenKind.IDENT, TokenKind.NUMBER) or self.peek(2).is_op("("):
                self.next(), self.next()
                return ">>"
            return None
        if token.value in ops and token.value != ">>":
            if token.is_op(">") and self._adjacent_gt(1):
                return None  # part of a shift, handled at the shift level
            self.next()
            return token.value
        return None

    def _adjacent_gt(self, offset: int) -> bool:
        prev = self.peek(offset - 1)
        nxt = self.peek(offset)
        return (
            nxt.is_op(">")
            and prev.is_op(">")
            and nxt.line == prev.line
            and nxt.col == prev.col + 1
        )

    def parse_unary(self) -> Expr:
        token = self.peek()
        if token.is_op("!", "~", "+", "-", "++", "--"):
            self.next()
            return Unary(token.value, self.parse_unary())
        if token.is_op("(") and self._looks_like_cast():
            self.next()
            type_name = self.try_parse_type()
            assert type_name is not None
            self.expect_op(")")
            return Cast(type_name, self.parse_unary())
        return self.parse_postfix()

    def _looks_like_cast(self) -> bool:
        save = self.pos
        try:
            self.next()  # '('
            type_name = self.try_parse_type()
            if type_name is None:
                return False
            if not self.peek().is_op(")"):
                return False
            follower = self.peek(1)
            if type_name in PRIMITIVES:
                return True
            return (
                follower.kind in (TokenKind.IDENT, TokenKind.NUMBER, TokenKind.STRING, TokenKind.CHAR)
                or follower.is_op("(", "!", "~")
                or follower.is_kw("new", "this", "super")
            )
        finally:
            self.pos = save

    def parse_postfix(self) -> Expr:
        expr = self.parse_primary()
        while True:
            token = self.peek()
            if token.is_op("."):
                nxt = self.peek(1)
                if nxt.is_op("<"):  # explicit type witness: expr.<T>member(...)
                    self.next()
                    if not self._skip_type_arguments():
                        raise self.error("unbalanced type witness")
                    nxt = self.peek()
                    if nxt.kind is not TokenKind.IDENT:
                        raise self.error("expected member after type witness")
                    member = self.next()
                    expr = Call(expr, member.value, self.parse_arguments(), member.line)
                    continue
                if nxt.kind is TokenKind.IDENT or nxt.is_kw("this", "new", "super", "class"):
                    self.next()
                    member = self.next()
                    if member.is_kw("new"):
                        # Qualified inner-class creation: treat like a call.
                        inner = self.next().value if self.peek().kind is TokenKind.IDENT else "?"
                        args = self.parse_arguments() if self.peek().is_op("(") else ()
                        expr = New(inner, args, member.line)
                        continue
                    if self.peek().is_op("("):
                        args = self.parse_arguments()
                        expr = Call(expr, member.value, args, member.line)
                    elif isinstance(expr, Name) and member.kind is TokenKind.IDENT:
                        expr = Name(expr.parts + (member.value,), expr.line)
                    else:
                        expr = FieldAccess(expr, member.value, member.line)
                    continue
                break
            if token.is_op("["):
                self.next()
                if self.accept_op("]"):  # array type in expression position
                    continue
                index = self.parse_expression()
                self.expect_op("]")
                expr = ArrayAccess(expr, index)
                continue
            if token.is_op("::"):
                self.next()
                self.next()  # method name or 'new'
                expr = MethodRef(token.line)
                continue
            if token.is_op("++", "--"):
                self.next()
                expr = Unary("post" + token.value, expr)
                continue
            break
        return expr

    def parse_arguments(self) -> tuple[Expr, ...]:
        self.expect_op("(")
        args: list[Expr] = []
        if self.accept_op(")"):
            return tuple(args)
        while True:
            args.append(self.parse_expression())
            if self.accept_op(")"):
                return tuple(args)
            self.expect_op(",")

    def parse_primary(self) -> Expr:
        token = self.peek()
        if token.kind in (TokenKind.NUMBER, TokenKind.STRING, TokenKind.CHAR):
            self.next()
            return Literal(token.value, token.line)
        if token.is_kw("this"):
            self.next()
            if self.peek().is_op("("):
                return Call(None, "this", self.parse_arguments(), token.line)
            return Name(("this",), token.line)
        if token.is_kw("super"):
            self.next()
            if self.peek().is_op("("):
                return Call(None, "super", self.parse_arguments(), token.line)
            return Name(("super",), token.line)
        if token.is_kw("new"):
            return self.parse_new()
        if token.is_op("("):
            self.next()
            inner = self.parse_expression()
            self.expect_op(")")
            return inner
        if token.kind is TokenKind.IDENT:
            self.next()
            if token.value in ("null", "true", "false"):
                return Literal(token.value, token.line)
            if self.peek().is_op("("):
                return Call(None, token.value, self.parse_arguments(), token.line)
            return Name((token.value,), token.line)
        if token.is_kw(*PRIMITIVES):
            self.next()  # e.g. int.class
            return Name((token.value,), token.line)
        raise self.error(f"unexpected token {token.value!r} in expression")

    def parse_new(self) -> Expr:
        new_token = self.next()
        type_name = self.try_parse_type(consume_array_dims=False)
        if type_name is None:
            raise self.error("expected type after 'new'")
        if self.peek().is_op("["):
            while self.peek().is_op("["):
                self.next()
                if not self.accept_op("]"):
                    self.parse_expression()
                    self.expect_op("]")
            if self.peek().is_op("{"):
                self.skip_balanced("{", "}")  # array initializer: contents ignored
            return New(type_name, (), new_token.line, is_array=True)
        args = self.parse_arguments() if self.peek().is_op("(") else ()
        anonymous: tuple[MethodDecl, ...] = ()
        if self.peek().is_op("{"):
            self.expect_op("{")
            holder = ClassDecl(name=type_name)
            self.parse_class_body(holder)
            anonymous = tuple(holder.methods)
        return New(type_name, args, new_token.line, anonymous_body=anonymous)


def parse_java(source: str, file_path: str = "<source>") -> list[ClassDecl]:
    """Parse a compilation unit into class declarations."""
    tokens = tokenize(source, file_path)
    return _Parser(tokens, file_path).parse_compilation_unit()
