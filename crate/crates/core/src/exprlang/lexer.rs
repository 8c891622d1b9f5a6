use super::LexError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Identifier,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offset of the first character.
    pub position: usize,
}

/// Splits `src` into tokens, skipping whitespace.
///
/// Numbers are decimal: digits with an optional fraction and an optional
/// exponent (`1`, `2.5`, `.5`, `1.5e-2`).
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(TokenKind::Plus),
            b'-' => Some(TokenKind::Minus),
            b'*' => Some(TokenKind::Star),
            b'/' => Some(TokenKind::Slash),
            b'^' => Some(TokenKind::Caret),
            b'(' => Some(TokenKind::LParen),
            b')' => Some(TokenKind::RParen),
            b',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token {
                kind,
                text: (c as char).to_string(),
                position: start,
            });
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            i = scan_number(bytes, i).ok_or_else(|| unexpected(src, start))?;
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| unexpected(src, start))?;
            out.push(Token {
                kind: TokenKind::Number(value),
                text: text.to_string(),
                position: start,
            });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Identifier,
                text: src[start..i].to_string(),
                position: start,
            });
        } else {
            return Err(unexpected(src, start));
        }
    }
    Ok(out)
}

fn unexpected(src: &str, position: usize) -> LexError {
    LexError {
        position,
        found: src[position..].chars().next().unwrap_or('\0'),
    }
}

/// Returns the end offset of the number starting at `i`, or `None` if malformed.
fn scan_number(b: &[u8], mut i: usize) -> Option<usize> {
    let digits = |b: &[u8], mut i: usize| {
        let s = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        (i, i - s)
    };
    let (next, int_digits) = digits(b, i);
    i = next;
    let mut frac_digits = 0;
    if i < b.len() && b[i] == b'.' {
        let (next, n) = digits(b, i + 1);
        i = next;
        frac_digits = n;
    }
    if int_digits + frac_digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let (next, n) = digits(b, j);
        if n == 0 {
            return None;
        }
        i = next;
    }
    Some(i)
}
