use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    Punct(char),
    Prime,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(ParseError::new(tl, tc, "unterminated string"));
                }
                out.push(Token {
                    tok: Tok::Str(chars[start..j].iter().collect()),
                    line: tl,
                    col: tc,
                });
                let n = j + 1 - i;
                advance(n, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                out.push(Token {
                    tok: Tok::Int(chars[start..i].iter().collect()),
                    line: tl,
                    col: tc,
                });
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                    col += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: tl,
                    col: tc,
                });
            }
            '\'' => {
                out.push(Token {
                    tok: Tok::Prime,
                    line: tl,
                    col: tc,
                });
                advance(1, &mut i, &mut col);
            }
            '{' | '}' | '[' | ']' | '(' | ')' | ',' | '*' | '/' | '^' | '+' | '-' | '=' | ':' => {
                out.push(Token {
                    tok: Tok::Punct(c),
                    line: tl,
                    col: tc,
                });
                advance(1, &mut i, &mut col);
            }
            other => {
                return Err(ParseError::new(tl, tc, format!("unexpected character `{other}`")));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
