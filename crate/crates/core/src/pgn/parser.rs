//! Streaming PGN reader.
//!
//! Reads line by line from any `BufRead`, so arbitrarily large exports can be
//! piped through without loading them. Comments (`{...}`, `;` to end of
//! line), NAGs, annotation glyphs, `%` escape lines and recursive variations
//! are dropped; only mainline SAN tokens are kept.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;

use super::PgnError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameResult {
    WhiteWins,
    BlackWins,
    Draw,
    Unknown,
}

impl GameResult {
    pub fn from_token(s: &str) -> Option<GameResult> {
        Some(match s {
            "1-0" => GameResult::WhiteWins,
            "0-1" => GameResult::BlackWins,
            "1/2-1/2" => GameResult::Draw,
            "*" => GameResult::Unknown,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GameResult::WhiteWins => "1-0",
            GameResult::BlackWins => "0-1",
            GameResult::Draw => "1/2-1/2",
            GameResult::Unknown => "*",
        }
    }

    /// Shard result code: 0 white wins, 1 black wins, 2 draw, 3 unknown.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<GameResult> {
        Some(match code {
            0 => GameResult::WhiteWins,
            1 => GameResult::BlackWins,
            2 => GameResult::Draw,
            3 => GameResult::Unknown,
            _ => return None,
        })
    }
}

impl fmt::Display for GameResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which bytes identify a game for splitting and storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GameIdMode {
    /// Trailing path segment of the Site URL (`AbCd1234`).
    #[default]
    SiteSegment,
    /// The full Site header value.
    FullSite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawGame {
    /// Position of the game in the stream, counting skipped games.
    pub index: u64,
    pub game_id: String,
    pub headers: BTreeMap<String, String>,
    pub san_moves: Vec<String>,
    pub result: GameResult,
}

/// Derives the game id from the Site header. Games without one get `#<index>`.
pub fn game_id_from_site(site: Option<&str>, mode: GameIdMode, index: u64) -> String {
    let site = match site.map(str::trim) {
        Some(s) if !s.is_empty() && s != "?" => s,
        _ => return format!("#{index}"),
    };
    match mode {
        GameIdMode::FullSite => site.to_string(),
        GameIdMode::SiteSegment => match site.trim_end_matches('/').rsplit_once('/') {
            Some((_, seg)) if !seg.is_empty() => seg.to_string(),
            _ => site.to_string(),
        },
    }
}

#[derive(Default)]
struct Partial {
    headers: BTreeMap<String, String>,
    san_moves: Vec<String>,
    result: Option<GameResult>,
    error: Option<String>,
    in_movetext: bool,
    variation_depth: u32,
    started: bool,
}

impl Partial {
    fn fail(&mut self, why: String) {
        if self.error.is_none() {
            self.error = Some(why);
        }
    }
}

pub struct PgnReader<R> {
    reader: R,
    mode: GameIdMode,
    line: String,
    line_no: u64,
    next_index: u64,
    in_comment: bool,
    pending: Option<Partial>,
    done: bool,
}

impl<R: BufRead> PgnReader<R> {
    pub fn new(reader: R) -> Self {
        Self::with_mode(reader, GameIdMode::default())
    }

    pub fn with_mode(reader: R, mode: GameIdMode) -> Self {
        PgnReader {
            reader,
            mode,
            line: String::new(),
            line_no: 0,
            next_index: 0,
            in_comment: false,
            pending: None,
            done: false,
        }
    }

    fn finish(&mut self, game: Partial) -> Result<RawGame, PgnError> {
        let index = self.next_index;
        self.next_index += 1;
        if let Some(reason) = game.error {
            return Err(PgnError::Malformed { index, reason });
        }
        if game.variation_depth != 0 {
            return Err(PgnError::Malformed {
                index,
                reason: "unclosed variation".into(),
            });
        }
        let result = game
            .result
            .or_else(|| game.headers.get("Result").and_then(|r| GameResult::from_token(r)))
            .unwrap_or(GameResult::Unknown);
        let game_id = game_id_from_site(game.headers.get("Site").map(String::as_str), self.mode, index);
        Ok(RawGame {
            index,
            game_id,
            headers: game.headers,
            san_moves: game.san_moves,
            result,
        })
    }

    fn read_line(&mut self) -> Result<bool, PgnError> {
        self.line.clear();
        let n = self
            .reader
            .read_line(&mut self.line)
            .map_err(|e| PgnError::Io(e.to_string()))?;
        if n == 0 {
            return Ok(false);
        }
        self.line_no += 1;
        if self.line_no == 1 && self.line.starts_with('\u{feff}') {
            self.line.drain(..3);
        }
        Ok(true)
    }

    fn next_game(&mut self) -> Option<Result<RawGame, PgnError>> {
        if self.done {
            return None;
        }
        loop {
            match self.read_line() {
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
                Ok(false) => {
                    self.done = true;
                    if self.in_comment {
                        return Some(Err(PgnError::StreamCorrupt(format!(
                            "end of input inside a comment (line {})",
                            self.line_no
                        ))));
                    }
                    return self.pending.take().filter(|g| g.started).map(|g| self.finish(g));
                }
                Ok(true) => {}
            }
            let line = std::mem::take(&mut self.line);
            let out = self.process_line(&line);
            self.line = line;
            match out {
                Ok(Some(done)) => return Some(self.finish(done)),
                Ok(None) => {}
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
    }

    /// Feeds one line; returns a game when this line completed one.
    fn process_line(&mut self, line: &str) -> Result<Option<Partial>, PgnError> {
        let trimmed = line.trim();
        if !self.in_comment {
            if trimmed.starts_with('%') {
                return Ok(None);
            }
            if trimmed.starts_with('[') {
                // a header after movetext begins the next game
                let finished = match &self.pending {
                    Some(g) if g.in_movetext => self.pending.take(),
                    _ => None,
                };
                let game = self.pending.get_or_insert_with(Partial::default);
                game.started = true;
                match parse_header(trimmed) {
                    Ok((k, v)) => {
                        game.headers.insert(k, v);
                    }
                    Err(why) if line.ends_with('\n') => game.fail(format!("line {}: {why}", self.line_no)),
                    Err(why) => {
                        return Err(PgnError::StreamCorrupt(format!(
                            "end of input inside a header (line {}): {why}",
                            self.line_no
                        )))
                    }
                }
                return Ok(finished);
            }
            if trimmed.is_empty() {
                return Ok(None);
            }
        }
        let line_no = self.line_no;
        let game = self.pending.get_or_insert_with(Partial::default);
        game.started = true;
        game.in_movetext = true;
        let ended = scan_movetext(line, game, &mut self.in_comment, line_no);
        if ended {
            return Ok(self.pending.take());
        }
        Ok(None)
    }
}

impl<R: BufRead> Iterator for PgnReader<R> {
    /// `Err(Malformed)` reports one skipped game and iteration continues;
    /// `Err(StreamCorrupt)` and `Err(Io)` are final.
    type Item = Result<RawGame, PgnError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_game()
    }
}

/// Parses PGN text into games in file order.
pub fn parse_pgn_stream<R: BufRead>(reader: R) -> PgnReader<R> {
    PgnReader::new(reader)
}

fn parse_header(line: &str) -> Result<(String, String), String> {
    let inner = line
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("unterminated header {line:?}"))?;
    let (key, rest) = inner
        .trim_start()
        .split_once(char::is_whitespace)
        .ok_or_else(|| format!("header without value {line:?}"))?;
    let rest = rest.trim();
    let body = rest
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .ok_or_else(|| format!("header value not quoted {line:?}"))?;
    let mut value = String::with_capacity(body.len());
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(escaped) = chars.next() {
                value.push(escaped);
            }
        } else {
            value.push(c);
        }
    }
    Ok((key.to_string(), value))
}

/// Scans one movetext line. Returns true when a game-termination marker was read.
fn scan_movetext(line: &str, game: &mut Partial, in_comment: &mut bool, line_no: u64) -> bool {
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if *in_comment {
            match line[i..].find('}') {
                Some(off) => {
                    *in_comment = false;
                    i += off + 1;
                    continue;
                }
                None => return false,
            }
        }
        let c = bytes[i];
        match c {
            b'{' => {
                *in_comment = true;
                i += 1;
            }
            b';' => return false,
            b'(' => {
                game.variation_depth += 1;
                i += 1;
            }
            b')' => {
                if game.variation_depth == 0 {
                    game.fail(format!("line {line_no}: unbalanced ')'"));
                } else {
                    game.variation_depth -= 1;
                }
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let end = line[i..]
                    .find(|ch: char| ch.is_whitespace() || matches!(ch, '{' | '}' | '(' | ')' | ';'))
                    .map_or(line.len(), |off| i + off);
                let token = &line[i..end];
                i = end;
                if game.variation_depth > 0 {
                    continue;
                }
                if let Some(r) = GameResult::from_token(token) {
                    game.result = Some(r);
                    return true;
                }
                classify_token(token, game, line_no);
            }
        }
    }
    false
}

fn classify_token(token: &str, game: &mut Partial, line_no: u64) {
    if let Some(nag) = token.strip_prefix('$') {
        if !nag.bytes().all(|b| b.is_ascii_digit()) {
            game.fail(format!("line {line_no}: bad NAG {token:?}"));
        }
        return;
    }
    // move numbers, possibly glued to the move: "12.", "12...", "12.Nf3"
    let rest = token.trim_start_matches(|c: char| c.is_ascii_digit());
    let rest = if rest.len() < token.len() && rest.starts_with('.') {
        rest.trim_start_matches('.')
    } else {
        token
    };
    if rest.is_empty() {
        return;
    }
    let san = rest.trim_end_matches(['!', '?']);
    if san.is_empty() {
        return;
    }
    let plausible = san.bytes().next().is_some_and(|b| b"abcdefghKQRBNO0".contains(&b))
        && san.bytes().all(|b| b.is_ascii_alphanumeric() || b"=+#-".contains(&b));
    if plausible {
        game.san_moves.push(san.to_string());
    } else {
        game.fail(format!("line {line_no}: unexpected token {token:?}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Vec<Result<RawGame, PgnError>> {
        parse_pgn_stream(text.as_bytes()).collect()
    }

    const TWO_GAMES: &str = r#"[Event "Rated Blitz game"]
[Site "https://lichess.org/AbCd1234"]
[Result "1-0"]

1. e4 { [%clk 0:03:00] } 1... e5 { [%clk 0:03:00] } 2. Qh5 { [%clk 0:02:59] } 2... Nc6 3. Bc4 Nf6?? 4. Qxf7# 1-0

[Event "Casual"]
[Site "https://lichess.org/XyZ98765"]
[Result "*"]

1. d4 d5 *
"#;

    #[test]
    fn comments_are_stripped() {
        let games = parse(TWO_GAMES);
        assert_eq!(games.len(), 2);
        let g = games[0].as_ref().unwrap();
        assert_eq!(g.san_moves, vec!["e4", "e5", "Qh5", "Nc6", "Bc4", "Nf6", "Qxf7#"]);
        assert_eq!(g.result, GameResult::WhiteWins);
        assert_eq!(g.game_id, "AbCd1234");
        let g = games[1].as_ref().unwrap();
        assert_eq!(g.san_moves, vec!["d4", "d5"]);
        assert_eq!(g.result, GameResult::Unknown);
        assert_eq!(g.index, 1);
    }

    #[test]
    fn variations_and_nags_skipped() {
        let text = "[Site \"x\"]\n\n1. e4 (1. d4 d5 (1... Nf6 2. c4)) 1... c5 $1 2. Nf3 $14 ; rest ignored e5\n2... d6 1/2-1/2\n";
        let g = parse(text).remove(0).unwrap();
        assert_eq!(g.san_moves, vec!["e4", "c5", "Nf3", "d6"]);
        assert_eq!(g.result, GameResult::Draw);
        assert_eq!(g.game_id, "x");
    }

    #[test]
    fn multiline_comment_and_escape() {
        let text = "% tool output\n[Site \"?\"]\n\n1. e4 {a comment\nthat spans [lines]} e5 2.Nf3 0-1\n";
        let g = parse(text).remove(0).unwrap();
        assert_eq!(g.san_moves, vec!["e4", "e5", "Nf3"]);
        assert_eq!(g.game_id, "#0");
    }

    #[test]
    fn missing_result_token_uses_header() {
        let text = "[Result \"0-1\"]\n\n1. f3 e5 2. g4 Qh4#\n\n[Result \"1-0\"]\n\n1. e4 1-0\n";
        let games = parse(text);
        assert_eq!(games.len(), 2);
        let g = games[0].as_ref().unwrap();
        assert_eq!(g.result, GameResult::BlackWins);
        assert_eq!(g.san_moves.len(), 4);
    }

    #[test]
    fn malformed_game_is_isolated() {
        let text =
            "[Site \"a\"]\n\n1. e4 e5 ) 2. Nf3 1-0\n\n[Site \"b\"]\n\n1. d4 @@ 1-0\n\n[Site \"c\"]\n\n1. c4 1-0\n";
        let games = parse(text);
        assert_eq!(games.len(), 3);
        assert!(matches!(games[0], Err(PgnError::Malformed { index: 0, .. })));
        assert!(matches!(games[1], Err(PgnError::Malformed { index: 1, .. })));
        assert_eq!(games[2].as_ref().unwrap().game_id, "c");
        assert_eq!(games[2].as_ref().unwrap().index, 2);
    }

    #[test]
    fn eof_inside_header_is_corrupt() {
        let games = parse("[Site \"a\"]\n\n1. e4 1-0\n\n[Site \"trunc");
        assert_eq!(games.len(), 2);
        assert!(games[0].is_ok());
        assert!(matches!(games[1], Err(PgnError::StreamCorrupt(_))));
    }

    #[test]
    fn eof_inside_comment_is_corrupt() {
        let games = parse("[Site \"a\"]\n\n1. e4 { never closed\n");
        assert!(matches!(games.last(), Some(Err(PgnError::StreamCorrupt(_)))));
    }

    #[test]
    fn header_escapes_and_bom() {
        let games = parse("\u{feff}[Event \"A \\\"quoted\\\" name\"]\n\n1. e4 *\n");
        let g = games[0].as_ref().unwrap();
        assert_eq!(g.headers["Event"], "A \"quoted\" name");
    }

    #[test]
    fn site_id_extraction() {
        assert_eq!(
            game_id_from_site(Some("https://lichess.org/AbCd1234"), GameIdMode::SiteSegment, 0),
            "AbCd1234"
        );
        assert_eq!(
            game_id_from_site(Some("https://lichess.org/AbCd1234"), GameIdMode::FullSite, 0),
            "https://lichess.org/AbCd1234"
        );
        assert_eq!(
            game_id_from_site(Some("Tashkent UZB"), GameIdMode::SiteSegment, 0),
            "Tashkent UZB"
        );
        assert_eq!(game_id_from_site(None, GameIdMode::SiteSegment, 7), "#7");
    }

    #[test]
    fn empty_input() {
        assert!(parse("").is_empty());
        assert!(parse("\n\n  \n").is_empty());
    }
}
