"""
Recursive-descent parser for MiniLang (grammar in syntax/grammar.txt).

Tree shapes:
    Program        children: FunctionDecl*
    FunctionDecl   label: name; children: Identifier per parameter, then Block
    Block          children: statements
    VarDecl        label: variable; children: [value]
    Assignment     label: variable; children: [value]
    IfStmt         children: [condition, then Block, else Block | IfStmt]
    WhileStmt      children: [condition, Block]
    ReturnStmt     children: [value] or []
    ExprStmt       children: [expression]
    EmptyStmt      leaf (a lone ``;``)
    MethodInvocation  label: ``f`` or ``ns.f``; children: [ArgumentList]
    MemberReference   label: ``ns.name``; leaf
    BinaryOperation / UnaryOperation  label: operator
    Literal / Identifier              label: lexeme

Parentheses group but produce no node.
"""

from typing import NoReturn

from mutforge.errors import ParseError
from mutforge.syntax.tokens import Token, TokenKind, tokenize
from mutforge.syntax.tree import NodeKind, SyntaxNode, SyntaxTree

# Binary operator precedence, loosest first.
BINARY_LEVELS: tuple[frozenset[str], ...] = (
    frozenset({"||"}),
    frozenset({"&&"}),
    frozenset({"==", "!="}),
    frozenset({"<", "<=", ">", ">="}),
    frozenset({"+", "-"}),
    frozenset({"*", "/", "%"}),
)
UNARY_OPERATORS = frozenset({"-", "!"})


def parse_mini(source: str) -> SyntaxTree:
    """
    Parse a MiniLang program.

    Raises:
        LexicalError: If the source does not tokenize.
        ParseError: With line/column of the first offending token.
    """
    tokens = tokenize(source)
    root = _Parser(tokens, source).program()
    return SyntaxTree(root=root, source=source)


class _Parser:
    def __init__(self, tokens: list[Token], source: str) -> None:
        self.tokens = tokens
        self.source = source
        self.pos = 0

    # -- token helpers -------------------------------------------------

    def peek(self, ahead: int = 0) -> Token | None:
        index = self.pos + ahead
        return self.tokens[index] if index < len(self.tokens) else None

    def at(self, text: str, ahead: int = 0) -> bool:
        token = self.peek(ahead)
        return token is not None and token.text == text and token.kind is not TokenKind.STRING_LITERAL

    def advance(self) -> Token:
        token = self.peek()
        if token is None:
            self.fail("unexpected end of input")
        self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.peek()
            self.fail(f"expected '{text}' but found {_describe(found)}")
        return self.advance()

    def expect_identifier(self) -> Token:
        token = self.peek()
        if token is None or token.kind is not TokenKind.IDENTIFIER:
            self.fail(f"expected identifier but found {_describe(token)}")
        return self.advance()

    def fail(self, message: str) -> NoReturn:
        token = self.peek()
        if token is None:
            line = self.source.count("\n") + 1
            column = len(self.source) - (self.source.rfind("\n") + 1) + 1
        else:
            line, column = token.line, token.column
        raise ParseError(message, line, column)

    def node(
        self,
        kind: NodeKind,
        first: Token,
        last: Token,
        label: str | None = None,
        children: tuple[SyntaxNode, ...] = (),
    ) -> SyntaxNode:
        return SyntaxNode(
            kind=kind,
            label=label,
            children=children,
            start=first.offset,
            end=last.end,
            line=first.line,
            end_line=last.line,
        )

    @property
    def last(self) -> Token:
        return self.tokens[self.pos - 1]

    # -- declarations --------------------------------------------------

    def program(self) -> SyntaxNode:
        functions: list[SyntaxNode] = []
        while self.peek() is not None:
            functions.append(self.function())
        end_line = self.source.count("\n") + 1
        return SyntaxNode(
            kind=NodeKind.PROGRAM,
            children=tuple(functions),
            start=0,
            end=len(self.source),
            line=1,
            end_line=end_line,
        )

    def function(self) -> SyntaxNode:
        first = self.expect("fn")
        name = self.expect_identifier()
        self.expect("(")
        params: list[SyntaxNode] = []
        if not self.at(")"):
            while True:
                param = self.expect_identifier()
                params.append(self.node(NodeKind.IDENTIFIER, param, param, param.text))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        body = self.block()
        return self.node(NodeKind.FUNCTION_DECL, first, self.last, name.text, (*params, body))

    def block(self) -> SyntaxNode:
        first = self.expect("{")
        statements: list[SyntaxNode] = []
        while not self.at("}"):
            if self.peek() is None:
                self.fail("unexpected end of input, missing '}'")
            statements.append(self.statement())
        self.expect("}")
        return self.node(NodeKind.BLOCK, first, self.last, children=tuple(statements))

    # -- statements ----------------------------------------------------

    def statement(self) -> SyntaxNode:
        token = self.peek()
        assert token is not None
        if self.at(";"):
            self.advance()
            return self.node(NodeKind.EMPTY_STMT, token, token)
        if self.at("let"):
            self.advance()
            name = self.expect_identifier()
            self.expect("=")
            value = self.expression()
            self.expect(";")
            return self.node(NodeKind.VAR_DECL, token, self.last, name.text, (value,))
        if self.at("if"):
            return self.if_statement()
        if self.at("while"):
            self.advance()
            self.expect("(")
            condition = self.expression()
            self.expect(")")
            body = self.block()
            return self.node(NodeKind.WHILE_STMT, token, self.last, children=(condition, body))
        if self.at("return"):
            self.advance()
            if self.at(";"):
                self.advance()
                return self.node(NodeKind.RETURN_STMT, token, self.last)
            value = self.expression()
            self.expect(";")
            return self.node(NodeKind.RETURN_STMT, token, self.last, children=(value,))
        if token.kind is TokenKind.IDENTIFIER and self.at("=", 1):
            self.advance()
            self.advance()
            value = self.expression()
            self.expect(";")
            return self.node(NodeKind.ASSIGNMENT, token, self.last, token.text, (value,))
        if token.kind is TokenKind.KEYWORD:
            self.fail(f"unexpected keyword '{token.text}'")
        expression = self.expression()
        self.expect(";")
        return self.node(NodeKind.EXPR_STMT, token, self.last, children=(expression,))

    def if_statement(self) -> SyntaxNode:
        first = self.expect("if")
        self.expect("(")
        condition = self.expression()
        self.expect(")")
        then = self.block()
        children: tuple[SyntaxNode, ...] = (condition, then)
        if self.at("else"):
            self.advance()
            otherwise = self.if_statement() if self.at("if") else self.block()
            children = (*children, otherwise)
        return self.node(NodeKind.IF_STMT, first, self.last, children=children)

    # -- expressions ---------------------------------------------------

    def expression(self, level: int = 0) -> SyntaxNode:
        if level == len(BINARY_LEVELS):
            return self.unary()
        left = self.expression(level + 1)
        operators = BINARY_LEVELS[level]
        while True:
            token = self.peek()
            if token is None or token.kind is not TokenKind.OPERATOR or token.text not in operators:
                return left
            self.advance()
            right = self.expression(level + 1)
            left = SyntaxNode(
                kind=NodeKind.BINARY_OPERATION,
                label=token.text,
                children=(left, right),
                start=left.start,
                end=right.end,
                line=left.line,
                end_line=right.end_line,
            )

    def unary(self) -> SyntaxNode:
        token = self.peek()
        if token is not None and token.kind is TokenKind.OPERATOR and token.text in UNARY_OPERATORS:
            self.advance()
            operand = self.unary()
            return SyntaxNode(
                kind=NodeKind.UNARY_OPERATION,
                label=token.text,
                children=(operand,),
                start=token.offset,
                end=operand.end,
                line=token.line,
                end_line=operand.end_line,
            )
        return self.primary()

    def primary(self) -> SyntaxNode:
        token = self.peek()
        if token is None:
            self.fail("expected expression but found end of input")
        if token.kind is TokenKind.INT_LITERAL:
            if not token.text.isdigit():
                self.fail(f"malformed integer literal '{token.text}'")
            self.advance()
            return self.node(NodeKind.LITERAL, token, token, token.text)
        if token.kind is TokenKind.BOOL_LITERAL:
            self.advance()
            return self.node(NodeKind.LITERAL, token, token, token.text)
        if self.at("("):
            self.advance()
            inner = self.expression()
            self.expect(")")
            return inner
        if token.kind is TokenKind.IDENTIFIER:
            self.advance()
            name = token.text
            if self.at("."):
                self.advance()
                member = self.expect_identifier()
                name = f"{name}.{member.text}"
            if self.at("("):
                return self.call(token, name)
            if "." in name:
                return self.node(NodeKind.MEMBER_REFERENCE, token, self.last, name)
            return self.node(NodeKind.IDENTIFIER, token, token, name)
        self.fail(f"expected expression but found {_describe(token)}")

    def call(self, first: Token, name: str) -> SyntaxNode:
        open_paren = self.expect("(")
        args: list[SyntaxNode] = []
        if not self.at(")"):
            while True:
                args.append(self.expression())
                if not self.at(","):
                    break
                self.advance()
        close = self.expect(")")
        arguments = self.node(NodeKind.ARGUMENT_LIST, open_paren, close, children=tuple(args))
        return self.node(NodeKind.METHOD_INVOCATION, first, close, name, (arguments,))


def _describe(token: Token | None) -> str:
    return "end of input" if token is None else f"'{token.text}'"
