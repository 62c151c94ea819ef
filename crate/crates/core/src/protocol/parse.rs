use super::{ProtocolError, ProtocolType, Signature, Tag};

/// Parses a protocol expression.
///
/// ```text
/// E ::= T ('+' T)*
/// T ::= F (('·' | '.') F)*
/// F ::= '0' | '1' | ident | '*' ident | '(' E ')'
/// ```
///
/// Positions in errors are character offsets into `text`.
pub fn parse_protocol(text: &str, sig: &Signature) -> Result<ProtocolType, ProtocolError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        sig,
    };
    parser.skip_ws();
    if parser.at_end() {
        return Err(parser.error("empty protocol expression"));
    }
    let ty = parser.sum()?;
    parser.skip_ws();
    if !parser.at_end() {
        return Err(parser.error(format!("unexpected `{}`", parser.chars[parser.pos])));
    }
    Ok(ty)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: impl Into<String>) -> ProtocolError {
        ProtocolError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn sum(&mut self) -> Result<ProtocolType, ProtocolError> {
        let mut left = self.shuffle()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('+') {
                return Ok(left);
            }
            self.pos += 1;
            let right = self.shuffle()?;
            left = ProtocolType::sum(left, right);
        }
    }

    fn shuffle(&mut self) -> Result<ProtocolType, ProtocolError> {
        let mut left = self.factor()?;
        loop {
            self.skip_ws();
            if !matches!(self.peek(), Some('·' | '.')) {
                return Ok(left);
            }
            self.pos += 1;
            let right = self.factor()?;
            left = ProtocolType::shuffle(left, right);
        }
    }

    fn factor(&mut self) -> Result<ProtocolType, ProtocolError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some('0') => {
                self.pos += 1;
                Ok(ProtocolType::Zero)
            }
            Some('1') => {
                self.pos += 1;
                Ok(ProtocolType::One)
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('*') => {
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                match self.peek() {
                    Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                        Ok(ProtocolType::Star(self.tag()?))
                    }
                    Some('(') | Some('*') | Some('0') | Some('1') => {
                        Err(ProtocolError::StarOnExpression { pos: start })
                    }
                    _ => Err(self.error("expected a tag after `*`")),
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => Ok(ProtocolType::Atom(self.tag()?)),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }

    fn tag(&mut self) -> Result<Tag, ProtocolError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if !self.sig.contains(&name) {
            return Err(ProtocolError::UnknownTag { name, pos: start });
        }
        Tag::new(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ProtocolType::*;

    fn sig() -> Signature {
        Signature::from_names(&["EMPTY", "FULL", "get", "put", "a", "b"]).unwrap()
    }

    #[test]
    fn parses_future_type() {
        let e = parse_protocol("*get·(EMPTY·put + FULL)", &sig()).unwrap();
        let expected = ProtocolType::shuffle(
            ProtocolType::star("get"),
            ProtocolType::sum(
                ProtocolType::shuffle(ProtocolType::atom("EMPTY"), ProtocolType::atom("put")),
                ProtocolType::atom("FULL"),
            ),
        );
        assert_eq!(e, expected);
        let ascii = parse_protocol(" *get . ( EMPTY . put+FULL ) ", &sig()).unwrap();
        assert_eq!(ascii, expected);
    }

    #[test]
    fn constants_and_precedence() {
        assert_eq!(parse_protocol("1", &sig()).unwrap(), One);
        assert_eq!(parse_protocol("0", &sig()).unwrap(), Zero);
        let e = parse_protocol("a·b + b·a", &sig()).unwrap();
        assert_eq!(
            e,
            ProtocolType::sum(
                ProtocolType::shuffle(ProtocolType::atom("a"), ProtocolType::atom("b")),
                ProtocolType::shuffle(ProtocolType::atom("b"), ProtocolType::atom("a")),
            )
        );
    }

    #[test]
    fn errors() {
        let s = sig();
        assert!(matches!(
            parse_protocol("a + zz", &s),
            Err(ProtocolError::UnknownTag { ref name, pos: 4 }) if name == "zz"
        ));
        assert!(matches!(
            parse_protocol("*(a + b)", &s),
            Err(ProtocolError::StarOnExpression { pos: 1 })
        ));
        assert!(matches!(
            parse_protocol("", &s),
            Err(ProtocolError::Syntax { .. })
        ));
        assert!(matches!(
            parse_protocol("a +", &s),
            Err(ProtocolError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse_protocol("(a", &s),
            Err(ProtocolError::Syntax { .. })
        ));
        assert!(matches!(
            parse_protocol("a b", &s),
            Err(ProtocolError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_protocol("a & b", &s),
            Err(ProtocolError::Syntax { .. })
        ));
    }
}
