//! Host-side reference implementations the kernels are validated against.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::reader::{parse_program, ReadError};
use crate::terms::Term;

/// A CNF literal over variables numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lit {
    Pos(usize),
    Neg(usize),
}

/// Two pigeons, `holes` holes: each pigeon sits in at least one hole and no
/// hole holds both. Variable `p * holes + h + 1` means pigeon `p` uses hole
/// `h`.
pub fn pigeon_cnf(holes: usize) -> Vec<Vec<Lit>> {
    let var = |p: usize, h: usize| p * holes + h + 1;
    let mut cnf: Vec<Vec<Lit>> = (0..2)
        .map(|p| (0..holes).map(|h| Lit::Pos(var(p, h))).collect())
        .collect();
    for h in 0..holes {
        cnf.push(vec![Lit::Neg(var(0, h)), Lit::Neg(var(1, h))]);
    }
    cnf
}

pub fn satisfies(cnf: &[Vec<Lit>], assignment: &[bool]) -> bool {
    cnf.iter().all(|clause| {
        clause.iter().any(|l| match *l {
            Lit::Pos(v) => assignment[v - 1],
            Lit::Neg(v) => !assignment[v - 1],
        })
    })
}

/// Number of satisfying assignments, by enumerating all `2^n_vars`.
pub fn count_models(cnf: &[Vec<Lit>], n_vars: usize) -> u64 {
    (0u64..1 << n_vars)
        .filter(|bits| {
            let a: Vec<bool> = (0..n_vars).map(|i| bits >> i & 1 == 1).collect();
            satisfies(cnf, &a)
        })
        .count() as u64
}

/// Undirected station graph.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    adj: BTreeMap<String, BTreeSet<String>>,
}

impl Graph {
    /// Reads `station(S, [N1, N2, ...])` facts.
    pub fn from_facts(src: &str) -> Result<Graph, ReadError> {
        let mut g = Graph::default();
        for clause in parse_program(src)? {
            let head = clause.head();
            let name = head.principal().map(|(f, _)| f.name());
            if let (Some("station"), [Term::Atom(a), ns]) = (name, head.args()) {
                for n in ns.list_items().into_iter().flatten() {
                    if let Term::Atom(b) = n {
                        g.add(a.name(), b.name());
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn add(&mut self, a: &str, b: &str) {
        self.adj.entry(a.to_owned()).or_default().insert(b.to_owned());
        self.adj.entry(b.to_owned()).or_default().insert(a.to_owned());
    }

    pub fn stations(&self) -> Vec<&str> {
        self.adj.keys().map(String::as_str).collect()
    }

    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        self.adj.get(a).is_some_and(|n| n.contains(b))
    }

    /// Hop count of a shortest path, by breadth-first search.
    pub fn distance(&self, from: &str, to: &str) -> Option<usize> {
        let mut dist: BTreeMap<&str, usize> = BTreeMap::from([(from, 0)]);
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                return dist.get(x).copied();
            }
            let d = dist[x];
            for y in self.adj.get(x).into_iter().flatten() {
                if !dist.contains_key(y.as_str()) {
                    dist.insert(y, d + 1);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// True if `path` is a shortest simple path from `from` to `to`.
    pub fn is_shortest_path(&self, from: &str, to: &str, path: &[&str]) -> bool {
        let Some(d) = self.distance(from, to) else {
            return false;
        };
        path.len() == d + 1
            && path.first() == Some(&from)
            && path.last() == Some(&to)
            && path.windows(2).all(|w| self.adjacent(w[0], w[1]))
    }
}

/// Deterministic route query endpoints spread over the station list.
pub fn route_pairs(stations: &[&str], k: usize) -> Vec<(String, String)> {
    let n = stations.len();
    (0..k)
        .map(|i| {
            (
                stations[(i * 7) % n].to_owned(),
                stations[(i * 11 + 3) % n].to_owned(),
            )
        })
        .collect()
}

pub const COLUMNS: usize = 7;
pub const ROWS: usize = 6;
const WIN: i64 = 1000;
const WEIGHTS: [i64; COLUMNS] = [0, 1, 2, 3, 2, 1, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    X,
    O,
}

impl Piece {
    pub fn other(self) -> Piece {
        match self {
            Piece::X => Piece::O,
            Piece::O => Piece::X,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Piece::X => "x",
            Piece::O => "o",
        }
    }
}

/// Connect-4 board; each column lists its pieces bottom first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Board {
    cols: [Vec<Piece>; COLUMNS],
}

impl Board {
    pub fn moves(&self) -> Vec<usize> {
        (0..COLUMNS).filter(|&c| self.cols[c].len() < ROWS).collect()
    }

    pub fn is_legal(&self, c: usize) -> bool {
        c < COLUMNS && self.cols[c].len() < ROWS
    }

    pub fn drop_piece(&mut self, c: usize, p: Piece) {
        self.cols[c].push(p);
    }

    fn at(&self, c: i64, r: i64) -> Option<Piece> {
        if c < 0 || r < 0 || c >= COLUMNS as i64 {
            return None;
        }
        self.cols[c as usize].get(r as usize).copied()
    }

    /// True if the top piece of column `c` completes four in a line.
    pub fn wins_at(&self, c: usize, p: Piece) -> bool {
        let r = self.cols[c].len() as i64 - 1;
        let run = |dc: i64, dr: i64| {
            let mut n = 0;
            let (mut x, mut y) = (c as i64, r);
            while n < 3 {
                x += dc;
                y += dr;
                if self.at(x, y) != Some(p) {
                    break;
                }
                n += 1;
            }
            n
        };
        [(1, 0), (0, 1), (1, 1), (1, -1)]
            .iter()
            .any(|&(dc, dr)| run(dc, dr) + run(-dc, -dr) >= 3)
    }

    fn heuristic(&self, p: Piece) -> i64 {
        self.cols
            .iter()
            .zip(WEIGHTS)
            .map(|(col, w)| {
                let mine = col.iter().filter(|&&q| q == p).count() as i64;
                w * (2 * mine - col.len() as i64)
            })
            .sum()
    }

    fn move_score(&self, p: Piece, c: usize, depth: u32) -> i64 {
        let mut child = self.clone();
        child.drop_piece(c, p);
        if child.wins_at(c, p) {
            WIN
        } else {
            -child.negamax(p.other(), depth)
        }
    }

    fn negamax(&self, p: Piece, depth: u32) -> i64 {
        let moves = self.moves();
        if moves.is_empty() {
            return 0;
        }
        if depth == 0 {
            return self.heuristic(p);
        }
        moves
            .iter()
            .map(|&c| self.move_score(p, c, depth - 1))
            .max()
            .expect("nonempty")
    }

    /// First move with the best negamax score, or `None` on a full board.
    pub fn best_move(&self, p: Piece, depth: u32) -> Option<usize> {
        let mut best: Option<(i64, usize)> = None;
        for c in self.moves() {
            let s = self.move_score(p, c, depth - 1);
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, c));
            }
        }
        best.map(|(_, c)| c)
    }
}

/// Plays best moves for both sides, `x` first, for at most `plies` plies or
/// until a win or a full board. Returns the moves.
pub fn connect4_game(depth: u32, plies: usize) -> Vec<usize> {
    let mut board = Board::default();
    let mut p = Piece::X;
    let mut moves = Vec::new();
    for _ in 0..plies {
        let Some(c) = board.best_move(p, depth) else {
            break;
        };
        board.drop_piece(c, p);
        moves.push(c);
        if board.wins_at(c, p) {
            break;
        }
        p = p.other();
    }
    moves
}

/// Replays `moves` from an empty board, checking every move is legal and
/// that no move follows a win.
pub fn legal_game(moves: &[usize]) -> bool {
    let mut board = Board::default();
    let mut p = Piece::X;
    for (i, &c) in moves.iter().enumerate() {
        if !board.is_legal(c) {
            return false;
        }
        board.drop_piece(c, p);
        if board.wins_at(c, p) && i + 1 != moves.len() {
            return false;
        }
        p = p.other();
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pigeon_model_count_matches_closed_form() {
        // Two nonempty disjoint subsets of h holes: 3^h - 2 * 2^h + 1.
        for h in 1..=5u32 {
            let want = 3u64.pow(h) + 1 - 2 * 2u64.pow(h);
            assert_eq!(count_models(&pigeon_cnf(h as usize), 2 * h as usize), want);
        }
    }

    #[test]
    fn bfs_on_chain() {
        let mut g = Graph::default();
        g.add("a", "b");
        g.add("b", "c");
        g.add("c", "d");
        assert_eq!(g.distance("a", "d"), Some(3));
        assert!(g.is_shortest_path("a", "d", &["a", "b", "c", "d"]));
        assert!(!g.is_shortest_path("a", "d", &["a", "c", "d"]));
    }

    #[test]
    fn horizontal_and_diagonal_wins() {
        let mut b = Board::default();
        for c in 0..4 {
            b.drop_piece(c, Piece::X);
        }
        assert!(b.wins_at(3, Piece::X));
        assert!(b.wins_at(1, Piece::X));
        let mut d = Board::default();
        for c in 0..4 {
            for _ in 0..c {
                d.drop_piece(c, Piece::O);
            }
            d.drop_piece(c, Piece::X);
        }
        assert!(d.wins_at(2, Piece::X));
        let mut three = Board::default();
        for c in 0..3 {
            three.drop_piece(c, Piece::X);
        }
        assert!(!three.wins_at(2, Piece::X));
    }

    #[test]
    fn takes_an_immediate_win_and_blocks() {
        let mut b = Board::default();
        for _ in 0..3 {
            b.drop_piece(4, Piece::X);
        }
        assert_eq!(b.best_move(Piece::X, 2), Some(4));
        assert_eq!(b.best_move(Piece::O, 2), Some(4));
    }

    #[test]
    fn scripted_game_is_legal() {
        let moves = connect4_game(2, 42);
        assert!(!moves.is_empty());
        assert!(legal_game(&moves));
        assert!(!legal_game(&[0, 0, 0, 0, 0, 0, 0]));
    }
}
