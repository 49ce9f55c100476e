"""Build MethodUsageModel values from parsed Java method bodies.

Analysis power is intentionally modest: objects are tracked
intraprocedurally by declared name with copies on assignment, fields of the
enclosing class count as objects named by the field, and receivers of
chained calls become fresh objects of unknown type.  This mirrors the kind
of static analysis the benchmarked detector families employ, including its
documented blind spots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import (
    UNKNOWN_TYPE,
    EventKind,
    MethodSignature,
    MethodUsageModel,
    SourceLocation,
    UsageEvent,
)
from . import javaparse as ast
from .javalex import ParseError


@dataclass(frozen=True, slots=True)
class ExtractionWarning:
    file_path: str
    method_name: str
    line: int | None
    message: str


@dataclass
class _Objects:
    """Name environment with assignment-copy aliasing."""

    enclosing_type: str
    fields: dict[str, str]
    env: dict[str, str] = field(default_factory=dict)  # name -> object ref
    types: dict[str, str] = field(default_factory=dict)  # object ref -> type
    fresh_count: int = 0

    def bind(self, name: str, type_name: str) -> str:
        ref = self.env.get(name)
        if ref is None:
            ref = name
            self.env[name] = ref
        current = self.types.get(ref)
        if current is None or (current == UNKNOWN_TYPE and type_name != UNKNOWN_TYPE):
            self.types[ref] = type_name
        return ref

    def alias(self, name: str, target_ref: str) -> None:
        self.env[name] = target_ref

    def fresh(self, type_name: str) -> str:
        self.fresh_count += 1
        ref = f"$chain{self.fresh_count}"
        self.types[ref] = type_name
        return ref

    def resolve(self, dotted: str) -> str:
        """Object for a (possibly dotted) name, materializing it if needed."""
        if dotted == "this" or dotted == "super":
            self.types.setdefault("this", self.enclosing_type)
            return "this"
        if dotted.startswith("this."):
            dotted = dotted[len("this.") :]
        if dotted in self.env:
            return self.env[dotted]
        head = dotted.split(".", 1)[0]
        if head in self.env and "." in dotted:
            # a.b where a is tracked: treat the whole path as its own object.
            self.env[dotted] = dotted
            self.types[dotted] = UNKNOWN_TYPE
            return dotted
        if dotted in self.fields:
            return self.bind(dotted, self.fields[dotted])
        if "." not in dotted and dotted[:1].isupper():
            # Heuristic: capitalized unknown simple name = static receiver.
            return self.bind(dotted, dotted)
        return self.bind(dotted, self.fields.get(dotted, UNKNOWN_TYPE))


class _ModelBuilder:
    def __init__(
        self,
        class_decl: ast.ClassDecl,
        method: ast.MethodDecl,
        location: SourceLocation,
    ):
        self.location = location
        self.objects = _Objects(enclosing_type=class_decl.name, fields=dict(class_decl.fields))
        self.events: list[UsageEvent] = []
        self.exceptional: set[tuple[int, int]] = set()

    # -- event helpers --

    def emit(self, event: UsageEvent) -> int:
        self.events.append(event)
        return len(self.events) - 1

    def marker(self, kind: EventKind, exception_type: str | None = None) -> None:
        self.emit(UsageEvent.marker(kind, exception_type))

    # -- expression walking --

    def walk_expr(self, expr: ast.Expr, in_condition: bool = False, as_value: bool = False) -> str | None:
        """Emit events for an expression; return an object ref for its value
        when the value is trackable (names, news, chained call results)."""
        if isinstance(expr, ast.Name):
            dotted = expr.dotted
            if dotted == "super":
                dotted = "this"
            if dotted.split(".", 1)[0] in ("null", "true", "false"):
                return None
            return self.objects.resolve(dotted)
        if isinstance(expr, ast.Literal):
            return None
        if isinstance(expr, ast.Call):
            return self.walk_call(expr, in_condition, as_value)
        if isinstance(expr, ast.New):
            return self.walk_new(expr, as_value)
        if isinstance(expr, ast.Assign):
            return self.walk_assign(expr, in_condition)
        if isinstance(expr, ast.Binary):
            self.walk_binary(expr, in_condition)
            return None
        if isinstance(expr, ast.Unary):
            self.walk_expr(expr.operand, in_condition)
            return None
        if isinstance(expr, ast.Ternary):
            self.walk_expr(expr.condition, in_condition=True)
            self.branch_arms([expr.when_true, expr.when_false], in_condition)
            return None
        if isinstance(expr, ast.Cast):
            return self.walk_expr(expr.operand, in_condition, as_value)
        if isinstance(expr, ast.ArrayAccess):
            self.walk_expr(expr.array)
            self.walk_expr(expr.index)
            return self.objects.fresh(UNKNOWN_TYPE) if as_value else None
        if isinstance(expr, ast.FieldAccess):
            self.walk_expr(expr.receiver, in_condition)
            return self.objects.fresh(UNKNOWN_TYPE) if as_value else None
        if isinstance(expr, ast.InstanceOf):
            self.walk_expr(expr.operand, in_condition)
            return None
        if isinstance(expr, (ast.Lambda, ast.MethodRef)):
            return None  # no call events from deferred bodies
        return None

    def walk_call(self, call: ast.Call, in_condition: bool, as_value: bool) -> str | None:
        for arg in call.args:
            self.walk_expr(arg)
        if call.name in ("this", "super"):  # constructor delegation
            return None
        if call.receiver is None:
            receiver_ref = self.objects.resolve("this")
            receiver_type: str | None = self.objects.types.get(receiver_ref)
        else:
            receiver_ref = self.walk_expr(call.receiver, as_value=True)
            if receiver_ref is None:
                receiver_ref = self.objects.fresh(UNKNOWN_TYPE)
            receiver_type = self.objects.types.get(receiver_ref)
        declaring = receiver_type if receiver_type not in (None, UNKNOWN_TYPE) else None
        signature = MethodSignature(call.name, len(call.args), declaring)
        self.emit(UsageEvent.call(receiver_ref, signature, call.line))
        if in_condition:
            self.emit(UsageEvent.value_check(receiver_ref, call.name, call.line))
        if as_value:
            return self.objects.fresh(UNKNOWN_TYPE)
        return None

    def walk_new(self, new: ast.New, as_value: bool, onto_ref: str | None = None) -> str | None:
        """Emit a constructor call; the created object is ``onto_ref`` when the
        result is bound to a variable, otherwise a fresh object."""
        for arg in new.args:
            self.walk_expr(arg)
        if new.is_array:
            return self.objects.fresh(new.type_name) if as_value else None
        ref = onto_ref if onto_ref is not None else self.objects.fresh(new.type_name)
        signature = MethodSignature(new.type_name, len(new.args), new.type_name)
        self.emit(UsageEvent.call(ref, signature, new.line))
        return ref

    def walk_assign(self, assign: ast.Assign, in_condition: bool) -> str | None:
        target = assign.target
        if assign.op == "=" and isinstance(target, ast.Name):
            name = target.dotted
            if name.startswith("this."):
                name = name[len("this.") :]
            if name.split(".", 1)[0] not in ("null", "true", "false"):
                return self.bind_value(name, UNKNOWN_TYPE, assign.value)
        self.walk_expr(target, in_condition)
        self.walk_expr(assign.value, in_condition)
        return None

    def bind_value(self, name: str, declared_type: str, value: ast.Expr) -> str | None:
        """Bind ``name`` to the value of ``value``, with copy-on-assignment
        aliasing for plain name sources and in-place constructor calls."""
        source = value
        while isinstance(source, ast.Cast):
            source = source.operand
        if isinstance(source, ast.Name) and source.dotted.split(".", 1)[0] not in (
            "null",
            "true",
            "false",
        ):
            target_ref = self.objects.resolve(source.dotted)
            self.objects.alias(name, target_ref)
            if declared_type != UNKNOWN_TYPE:
                self.objects.bind(name, declared_type)
            return target_ref
        if isinstance(source, ast.New) and not source.is_array:
            ref = self.objects.bind(name, source.type_name)
            return self.walk_new(source, as_value=False, onto_ref=ref)
        self.walk_expr(value)
        return self.objects.bind(name, declared_type)

    def walk_binary(self, binary: ast.Binary, in_condition: bool) -> None:
        if binary.op in ("==", "!="):
            left_null = isinstance(binary.left, ast.Literal) and binary.left.value == "null"
            right_null = isinstance(binary.right, ast.Literal) and binary.right.value == "null"
            other = binary.right if left_null else binary.left if right_null else None
            if other is not None and isinstance(other, ast.Name):
                dotted = other.dotted
                if dotted.split(".", 1)[0] not in ("null", "true", "false"):
                    ref = self.objects.resolve(dotted)
                    line = other.line
                    self.emit(UsageEvent.null_check(ref, line))
                    return
        self.walk_expr(binary.left, in_condition)
        self.walk_expr(binary.right, in_condition)

    # -- statement walking --

    def branch_arms(self, arms: list[ast.Expr | ast.Stmt | None], in_condition: bool = False) -> None:
        for arm in arms:
            if arm is None:
                continue
            self.marker(EventKind.BRANCH_ENTER)
            if isinstance(arm, ast.Expr):
                self.walk_expr(arm, in_condition)
            else:
                self.walk_stmt(arm)
            self.marker(EventKind.BRANCH_EXIT)

    def walk_stmt(self, stmt: ast.Stmt) -> None:
        if isinstance(stmt, ast.Block):
            for inner in stmt.statements:
                self.walk_stmt(inner)
        elif isinstance(stmt, ast.LocalDecl):
            self.walk_local_decl(stmt)
        elif isinstance(stmt, ast.ExprStmt):
            self.walk_expr(stmt.expr)
        elif isinstance(stmt, ast.If):
            self.walk_expr(stmt.condition, in_condition=True)
            self.branch_arms([stmt.then_branch, stmt.else_branch])
        elif isinstance(stmt, ast.While):
            self.marker(EventKind.LOOP_ENTER)
            self.walk_expr(stmt.condition, in_condition=True)
            self.walk_stmt(stmt.body)
            self.marker(EventKind.LOOP_EXIT)
        elif isinstance(stmt, ast.DoWhile):
            self.marker(EventKind.LOOP_ENTER)
            self.walk_stmt(stmt.body)
            self.walk_expr(stmt.condition, in_condition=True)
            self.marker(EventKind.LOOP_EXIT)
        elif isinstance(stmt, ast.ForClassic):
            for init in stmt.init:
                self.walk_stmt(init)
            self.marker(EventKind.LOOP_ENTER)
            if stmt.condition is not None:
                self.walk_expr(stmt.condition, in_condition=True)
            self.walk_stmt(stmt.body)
            for update in stmt.update:
                self.walk_expr(update)
            self.marker(EventKind.LOOP_EXIT)
        elif isinstance(stmt, ast.ForEach):
            self.walk_expr(stmt.iterable)
            self.objects.bind(stmt.var_name, stmt.var_type)
            self.marker(EventKind.LOOP_ENTER)
            self.walk_stmt(stmt.body)
            self.marker(EventKind.LOOP_EXIT)
        elif isinstance(stmt, ast.Try):
            self.walk_try(stmt)
        elif isinstance(stmt, ast.Switch):
            self.walk_expr(stmt.selector, in_condition=True)
            self.branch_arms([ast.Block(case.statements) for case in stmt.cases])
        elif isinstance(stmt, ast.Return):
            if stmt.expr is not None:
                self.walk_expr(stmt.expr)
        elif isinstance(stmt, ast.Throw):
            self.walk_expr(stmt.expr)
        elif isinstance(stmt, ast.Synchronized):
            self.walk_expr(stmt.monitor)
            self.walk_stmt(stmt.body)
        elif isinstance(stmt, ast.SimpleStmt):
            for expr in stmt.exprs:
                self.walk_expr(expr)
        elif isinstance(stmt, ast.CatchClause):  # handled by walk_try
            raise AssertionError("catch clause outside try")

    def walk_local_decl(self, decl: ast.LocalDecl) -> None:
        type_name = UNKNOWN_TYPE if decl.type_name == "var" else decl.type_name
        for name, init in decl.declarators:
            if init is None:
                self.objects.bind(name, type_name)
            else:
                self.bind_value(name, type_name, init)

    def walk_try(self, stmt: ast.Try) -> None:
        try_start = len(self.events)
        self.marker(EventKind.TRY_ENTER)
        for resource in stmt.resources:
            self.walk_local_decl(resource)
        self.walk_stmt(stmt.body)
        try_end = len(self.events)
        handler_spans: list[tuple[int, int]] = []
        for catch in stmt.catches:
            self.marker(EventKind.CATCH_ENTER, catch.exception_types[0])
            self.marker(EventKind.BRANCH_ENTER)
            span_start = len(self.events)
            self.objects.bind(catch.var_name, catch.exception_types[0])
            self.walk_stmt(catch.body)
            handler_spans.append((span_start, len(self.events)))
            self.marker(EventKind.BRANCH_EXIT)
        if stmt.finally_block is not None:
            self.marker(EventKind.FINALLY_ENTER)
            self.marker(EventKind.BRANCH_ENTER)
            span_start = len(self.events)
            self.walk_stmt(stmt.finally_block)
            handler_spans.append((span_start, len(self.events)))
            self.marker(EventKind.BRANCH_EXIT)
        protected = [
            i
            for i in range(try_start, try_end)
            if self.events[i].kind is EventKind.CALL
        ]
        for span_index, (start, end) in enumerate(handler_spans):
            handler_calls = [
                j for j in range(start, end) if self.events[j].kind is EventKind.CALL
            ]
            for i in protected:
                for j in handler_calls:
                    self.exceptional.add((i, j))
            # An exception escaping an earlier handler still runs finally.
            if stmt.finally_block is not None and span_index < len(handler_spans) - 1:
                final_start, final_end = handler_spans[-1]
                final_calls = [
                    j for j in range(final_start, final_end) if self.events[j].kind is EventKind.CALL
                ]
                for i in handler_calls:
                    for j in final_calls:
                        self.exceptional.add((i, j))

    # -- assembly --

    def build(self) -> MethodUsageModel:
        referenced: list[str] = []
        seen: set[str] = set()
        for event in self.events:
            ref = event.object_ref
            if ref is not None and ref not in seen:
                seen.add(ref)
                referenced.append(ref)
        objects = tuple(
            (ref, self.objects.types.get(ref, UNKNOWN_TYPE)) for ref in referenced
        )
        return MethodUsageModel(
            location=self.location,
            objects=objects,
            events=tuple(self.events),
            exceptional_successors=frozenset(self.exceptional),
        )


def _extract_methods(
    class_decl: ast.ClassDecl,
    file_path: str,
    project_id: str,
    version_id: str,
    models: list[MethodUsageModel],
    warnings: list[ExtractionWarning],
) -> None:
    for method in class_decl.methods:
        if method.body_error is not None:
            warnings.append(
                ExtractionWarning(file_path, method.name, method.line, method.body_error)
            )
            continue
        if method.body is None:
            continue
        location = SourceLocation(
            project_id=project_id,
            version_id=version_id,
            file_path=file_path,
            method_name=method.name,
            line=method.line,
        )
        builder = _ModelBuilder(class_decl, method, location)
        for param_type, param_name in method.params:
            builder.objects.bind(param_name, param_type)
        try:
            builder.walk_stmt(method.body)
            models.append(builder.build())
        except (ParseError, ValueError, RecursionError) as exc:
            warnings.append(ExtractionWarning(file_path, method.name, method.line, str(exc)))
        # Anonymous-class bodies: separate models, one per declared method.
        for anon_class, anon_method in _anonymous_methods(method.body):
            anon_decl = ast.ClassDecl(name=anon_class, fields=dict(class_decl.fields))
            anon_decl.methods.append(anon_method)
            _extract_methods(anon_decl, file_path, project_id, version_id, models, warnings)
    for nested in class_decl.nested:
        _extract_methods(nested, file_path, project_id, version_id, models, warnings)


def _anonymous_methods(stmt: ast.Stmt | ast.Expr | None):
    """Yield (type_name, method) for anonymous class bodies in a subtree."""
    stack: list[object] = [stmt]
    while stack:
        node = stack.pop()
        if node is None:
            continue
        if isinstance(node, tuple):
            stack.extend(node)
            continue
        if not hasattr(node, "__dataclass_fields__"):
            continue
        if isinstance(node, ast.New):
            for method in node.anonymous_body:
                if method.body is not None or method.body_error is not None:
                    yield node.type_name, method
        for field_name in node.__dataclass_fields__:  # type: ignore[attr-defined]
            value = getattr(node, field_name)
            if isinstance(value, tuple) or hasattr(value, "__dataclass_fields__"):
                stack.append(value)


def parse_method_models(
    source_text: str,
    file_path: str,
    project_id: str = "",
    version_id: str = "",
    warnings: list[ExtractionWarning] | None = None,
) -> list[MethodUsageModel]:
    """Extract one usage model per method/constructor body in a Java file.

    Raises ParseError when the compilation unit itself cannot be parsed;
    individual methods that defeat extraction are skipped with a warning
    record appended to ``warnings``.
    """
    sink = warnings if warnings is not None else []
    classes = ast.parse_java(source_text, file_path)
    models: list[MethodUsageModel] = []
    for class_decl in classes:
        _extract_methods(class_decl, file_path, project_id, version_id, models, sink)
    return models
