use std::ops::Range;

use thiserror::Error;

use super::ast::{BinaryOp, Expr, RefTarget, UnaryOp};
use super::lexer::{tokenize, LexError, Token, TokenKind};
use crate::address::{is_valid_name, parse_cell_coords, CellAddress, RangeRef};
use crate::value::{parse_number, Array, ErrorKind, Value};

const MAX_NESTING: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("syntax error at {span:?}: {message}")]
    Syntax { message: String, span: Range<usize> },
    /// Data tables are declared with a `table` directive, never typed in.
    #[error("TABLE cannot be entered in a formula (offset {})", span.start)]
    TableNotEnterable { span: Range<usize> },
}

/// Parses formula source (without the leading `=`). References are
/// qualified with `context`'s workbook and sheet.
pub fn parse_formula(source: &str, context: &CellAddress) -> Result<Expr, FormulaError> {
    let tokens = tokenize(source)?;
    let end = source.chars().count();
    let mut p = Parser {
        tokens,
        pos: 0,
        context,
        end,
        depth: 0,
    };
    let expr = p.expression()?;
    if let Some(t) = p.peek() {
        return Err(p.error_at(format!("unexpected `{}`", t.lexeme), t.span.clone()));
    }
    Ok(expr)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    context: &'a CellAddress,
    end: usize,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Punct && t.lexeme == p)
    }

    fn is_operator(&self, ops: &[&str]) -> Option<String> {
        self.peek()
            .filter(|t| t.kind == TokenKind::Operator && ops.contains(&t.lexeme.as_str()))
            .map(|t| t.lexeme.clone())
    }

    fn error_at(&self, message: String, span: Range<usize>) -> FormulaError {
        FormulaError::Syntax { message, span }
    }

    fn error_here(&self, message: &str) -> FormulaError {
        let span = self.peek().map_or(self.end..self.end, |t| t.span.clone());
        self.error_at(message.to_string(), span)
    }

    fn expect_punct(&mut self, p: &str) -> Result<Token, FormulaError> {
        if self.is_punct(p) {
            Ok(self.next().expect("peeked"))
        } else {
            Err(self.error_here(&format!("expected `{p}`")))
        }
    }

    fn expression(&mut self) -> Result<Expr, FormulaError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error_here("formula nested too deeply"));
        }
        let e = self.comparison();
        self.depth -= 1;
        e
    }

    fn binary_level(
        &mut self,
        ops: &[&str],
        next: fn(&mut Self) -> Result<Expr, FormulaError>,
    ) -> Result<Expr, FormulaError> {
        let mut lhs = next(self)?;
        while let Some(op) = self.is_operator(ops) {
            self.next();
            let rhs = next(self)?;
            let op = BinaryOp::from_symbol(&op).expect("known operator");
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> Result<Expr, FormulaError> {
        self.binary_level(&["=", "<>", "<", "<=", ">", ">="], Self::concat)
    }

    fn concat(&mut self) -> Result<Expr, FormulaError> {
        self.binary_level(&["&"], Self::additive)
    }

    fn additive(&mut self) -> Result<Expr, FormulaError> {
        self.binary_level(&["+", "-"], Self::multiplicative)
    }

    fn multiplicative(&mut self) -> Result<Expr, FormulaError> {
        self.binary_level(&["*", "/"], Self::power)
    }

    fn power(&mut self) -> Result<Expr, FormulaError> {
        self.binary_level(&["^"], Self::unary)
    }

    fn unary(&mut self) -> Result<Expr, FormulaError> {
        if let Some(op) = self.is_operator(&["-", "+"]) {
            self.next();
            self.depth += 1;
            if self.depth > MAX_NESTING {
                return Err(self.error_here("formula nested too deeply"));
            }
            let inner = self.unary();
            self.depth -= 1;
            let op = if op == "-" { UnaryOp::Neg } else { UnaryOp::Plus };
            return Ok(Expr::Unary(op, Box::new(inner?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, FormulaError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_here("unexpected end of formula"));
        };
        match tok.kind {
            TokenKind::Number => {
                self.next();
                let n =
                    parse_number(&tok.lexeme).ok_or_else(|| self.error_at("bad number".into(), tok.span.clone()))?;
                Ok(Expr::Literal(Value::Number(n)))
            }
            TokenKind::Text => {
                self.next();
                Ok(Expr::Literal(Value::Text(unquote_text(&tok.lexeme))))
            }
            TokenKind::Boolean => {
                self.next();
                Ok(Expr::Literal(Value::Boolean(tok.lexeme.eq_ignore_ascii_case("TRUE"))))
            }
            TokenKind::ErrorLiteral => {
                self.next();
                let e = ErrorKind::parse(&tok.lexeme).expect("lexer validated");
                Ok(Expr::Literal(Value::Error(e)))
            }
            TokenKind::Punct if tok.lexeme == "(" => {
                self.next();
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            TokenKind::Punct if tok.lexeme == "{" => self.array_constant(),
            TokenKind::Punct if tok.lexeme == "[" => self.reference(),
            TokenKind::Identifier if self.peek_at(1).is_some_and(|t| t.lexeme == "(") => self.call(),
            TokenKind::Identifier | TokenKind::CellRef => self.reference(),
            _ => Err(self.error_at(format!("unexpected `{}`", tok.lexeme), tok.span)),
        }
    }

    fn call(&mut self) -> Result<Expr, FormulaError> {
        let name_tok = self.next().expect("peeked");
        let name = name_tok.lexeme.to_ascii_uppercase();
        if name == "TABLE" {
            return Err(FormulaError::TableNotEnterable { span: name_tok.span });
        }
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.is_punct(")") {
            self.next();
            return Ok(Expr::Call(name, args));
        }
        loop {
            if self.is_punct(",") || self.is_punct(")") {
                args.push(Expr::Omitted);
            } else {
                args.push(self.expression()?);
            }
            if self.is_punct(",") {
                self.next();
                continue;
            }
            self.expect_punct(")")?;
            break;
        }
        Ok(Expr::Call(name, args))
    }

    fn array_constant(&mut self) -> Result<Expr, FormulaError> {
        let open = self.expect_punct("{")?;
        let mut rows: Vec<Vec<Value>> = vec![Vec::new()];
        loop {
            let negate = if self.is_operator(&["-"]).is_some() {
                self.next();
                true
            } else {
                false
            };
            let tok = self
                .next()
                .ok_or_else(|| self.error_at("unterminated array constant".into(), open.span.clone()))?;
            let value = match tok.kind {
                TokenKind::Number => {
                    let n = parse_number(&tok.lexeme)
                        .ok_or_else(|| self.error_at("bad number".into(), tok.span.clone()))?;
                    Value::Number(if negate { -n } else { n })
                }
                _ if negate => return Err(self.error_at("`-` must precede a number".into(), tok.span)),
                TokenKind::Text => Value::Text(unquote_text(&tok.lexeme)),
                TokenKind::Boolean => Value::Boolean(tok.lexeme.eq_ignore_ascii_case("TRUE")),
                TokenKind::ErrorLiteral => Value::Error(ErrorKind::parse(&tok.lexeme).expect("lexer validated")),
                _ => {
                    return Err(self.error_at(
                        format!("array constants hold literals only, found `{}`", tok.lexeme),
                        tok.span,
                    ))
                }
            };
            rows.last_mut().expect("non-empty").push(value);
            let sep = self
                .next()
                .ok_or_else(|| self.error_at("unterminated array constant".into(), open.span.clone()))?;
            match (sep.kind, sep.lexeme.as_str()) {
                (TokenKind::Punct, ",") => {}
                (TokenKind::Punct, ";") => rows.push(Vec::new()),
                (TokenKind::Punct, "}") => break,
                _ => return Err(self.error_at(format!("unexpected `{}` in array constant", sep.lexeme), sep.span)),
            }
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(self.error_at("array constant rows differ in length".into(), open.span));
        }
        let n_rows = rows.len();
        Ok(Expr::ArrayConst(Array::new(
            n_rows,
            cols,
            rows.into_iter().flatten().collect(),
        )))
    }

    fn coords(&mut self) -> Result<(u32, u32), FormulaError> {
        let tok = self
            .next()
            .ok_or_else(|| self.error_here("expected a cell reference"))?;
        if tok.kind != TokenKind::CellRef {
            return Err(self.error_at(format!("expected a cell reference, found `{}`", tok.lexeme), tok.span));
        }
        parse_cell_coords(&tok.lexeme)
            .ok_or_else(|| self.error_at(format!("reference `{}` is outside the grid", tok.lexeme), tok.span))
    }

    fn reference(&mut self) -> Result<Expr, FormulaError> {
        let mut workbook: Option<String> = None;
        if self.is_punct("[") {
            self.next();
            let tok = self.next().ok_or_else(|| self.error_here("expected a workbook name"))?;
            if tok.kind != TokenKind::Identifier || !is_valid_name(&tok.lexeme) {
                return Err(self.error_at("invalid workbook name".into(), tok.span));
            }
            workbook = Some(tok.lexeme);
            self.expect_punct("]")?;
        }

        let first = self
            .peek()
            .cloned()
            .ok_or_else(|| self.error_here("expected a reference"))?;
        let has_sheet = self
            .peek_at(1)
            .is_some_and(|t| t.kind == TokenKind::Punct && t.lexeme == "!");
        let mut sheet: Option<String> = None;
        if has_sheet
            && matches!(
                first.kind,
                TokenKind::Identifier | TokenKind::CellRef | TokenKind::Number
            )
        {
            self.next();
            self.next();
            let name = unquote_sheet(&first.lexeme);
            if !is_valid_name(&name) {
                return Err(self.error_at("invalid sheet name".into(), first.span));
            }
            sheet = Some(name);
        } else if first.kind == TokenKind::Identifier {
            // defined name
            self.next();
            return Ok(Expr::Ref(RefTarget::Name {
                workbook,
                name: first.lexeme,
            }));
        } else if workbook.is_some() {
            return Err(self.error_at("workbook qualifier needs a sheet".into(), first.span));
        }

        let base = CellAddress::new(
            workbook.unwrap_or_else(|| self.context.workbook.clone()),
            sheet.unwrap_or_else(|| self.context.sheet.clone()),
            0,
            0,
        );
        let (c1, r1) = self.coords()?;
        if self.is_punct(":") {
            self.next();
            let (c2, r2) = self.coords()?;
            return Ok(Expr::Ref(RefTarget::Range(RangeRef::new(
                base.with_coords(c1, r1),
                base.with_coords(c2, r2),
            ))));
        }
        Ok(Expr::Ref(RefTarget::Cell(base.with_coords(c1, r1))))
    }
}

fn unquote_text(lexeme: &str) -> String {
    lexeme[1..lexeme.len() - 1].replace("\"\"", "\"")
}

fn unquote_sheet(lexeme: &str) -> String {
    match lexeme.strip_prefix('\'').and_then(|s| s.strip_suffix('\'')) {
        Some(inner) => inner.replace("''", "'"),
        None => lexeme.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> CellAddress {
        CellAddress::new("Book", "Sheet1", 4, 2)
    }

    fn cell(col: u32, row: u32) -> Expr {
        Expr::Ref(RefTarget::Cell(CellAddress::new("Book", "Sheet1", col, row)))
    }

    fn call(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Call(name.into(), args)
    }

    fn num(n: f64) -> Expr {
        Expr::Literal(Value::Number(n))
    }

    #[test]
    fn d2_fragment() {
        let e = parse_formula("IF(LEN(A2)=10,B2,C2)", &ctx()).unwrap();
        assert_eq!(
            e,
            call(
                "IF",
                vec![
                    Expr::Binary(
                        BinaryOp::Eq,
                        Box::new(call("LEN", vec![cell(1, 2)])),
                        Box::new(num(10.0))
                    ),
                    cell(2, 2),
                    cell(3, 2),
                ]
            )
        );
    }

    #[test]
    fn concatenated_index_calls() {
        let e = parse_formula("INDEX(INDIRECT(A2),1)&INDEX(INDIRECT(A2),2)", &ctx()).unwrap();
        let Expr::Binary(BinaryOp::Concat, l, r) = e else {
            panic!("{e:?}")
        };
        assert!(matches!(*l, Expr::Call(ref n, _) if n == "INDEX"));
        assert!(matches!(*r, Expr::Call(ref n, _) if n == "INDEX"));
    }

    #[test]
    fn table_is_rejected() {
        assert!(matches!(
            parse_formula("TABLE(,A2)", &ctx()),
            Err(FormulaError::TableNotEnterable { .. })
        ));
        assert!(matches!(
            parse_formula("1+table(A2,)", &ctx()),
            Err(FormulaError::TableNotEnterable { .. })
        ));
    }

    #[test]
    fn omitted_arguments() {
        let e = parse_formula("ADDRESS(1,2,,,\"S\")", &ctx()).unwrap();
        let Expr::Call(_, args) = e else { panic!() };
        assert_eq!(args.len(), 5);
        assert_eq!(args[2], Expr::Omitted);
        assert_eq!(args[3], Expr::Omitted);
    }

    #[test]
    fn precedence() {
        // unary minus binds tighter than ^, comparisons are loosest
        let e = parse_formula("-2^2", &ctx()).unwrap();
        assert!(matches!(e, Expr::Binary(BinaryOp::Pow, ref l, _) if matches!(**l, Expr::Unary(UnaryOp::Neg, _))));
        let e = parse_formula("1+2&3=4", &ctx()).unwrap();
        let Expr::Binary(BinaryOp::Eq, l, _) = e else { panic!() };
        let Expr::Binary(BinaryOp::Concat, ll, _) = *l else {
            panic!()
        };
        assert!(matches!(*ll, Expr::Binary(BinaryOp::Add, _, _)));
        let e = parse_formula("2*3+4", &ctx()).unwrap();
        assert!(matches!(e, Expr::Binary(BinaryOp::Add, _, _)));
    }

    #[test]
    fn qualified_refs_and_names() {
        let e = parse_formula("[lib]ISBN10check!B9", &ctx()).unwrap();
        assert_eq!(
            e,
            Expr::Ref(RefTarget::Cell(CellAddress::new("lib", "ISBN10check", 2, 9)))
        );
        let e = parse_formula("Sheet2!A1:$D$3", &ctx()).unwrap();
        let Expr::Ref(RefTarget::Range(r)) = e else { panic!() };
        assert_eq!(r.top_left, CellAddress::new("Book", "Sheet2", 1, 1));
        assert_eq!(r.bottom_right, CellAddress::new("Book", "Sheet2", 4, 3));
        let e = parse_formula("ISBNcheck", &ctx()).unwrap();
        assert_eq!(
            e,
            Expr::Ref(RefTarget::Name {
                workbook: None,
                name: "ISBNcheck".into()
            })
        );
        let e = parse_formula("'My sheet'!A1", &ctx()).unwrap();
        assert_eq!(
            e,
            Expr::Ref(RefTarget::Cell(CellAddress::new("Book", "My sheet", 1, 1)))
        );
    }

    #[test]
    fn array_constants() {
        let e = parse_formula("{1;2;3}", &ctx()).unwrap();
        let Expr::ArrayConst(a) = e else { panic!() };
        assert_eq!(a.dims(), (3, 1));
        let e = parse_formula("{1,-2;\"a\",TRUE}", &ctx()).unwrap();
        let Expr::ArrayConst(a) = e else { panic!() };
        assert_eq!(a.dims(), (2, 2));
        assert_eq!(a.get(0, 1), Some(&Value::Number(-2.0)));
        assert!(parse_formula("{1,2;3}", &ctx()).is_err());
        assert!(parse_formula("{A1}", &ctx()).is_err());
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "1+", "(1", "F(1", "1 2", "XFE1", "[b]A1", "{1,", "SUM(1))"] {
            assert!(
                matches!(parse_formula(bad, &ctx()), Err(FormulaError::Syntax { .. })),
                "{bad:?} should be a syntax error"
            );
        }
        let deep = format!("{}1{}", "(".repeat(1000), ")".repeat(1000));
        assert!(parse_formula(&deep, &ctx()).is_err());
    }
}
