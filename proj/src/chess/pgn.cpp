#include "qkrd/chess/pgn.hpp"

#include <algorithm>
#include <cctype>

namespace qkrd::chess {

namespace {

bool is_result_token(std::string_view t) {
  return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*";
}

std::optional<PieceKind> san_piece(char c) {
  switch (c) {
    case 'N': return PieceKind::knight;
    case 'B': return PieceKind::bishop;
    case 'R': return PieceKind::rook;
    case 'Q': return PieceKind::queen;
    case 'K': return PieceKind::king;
    default: return std::nullopt;
  }
}

}  // namespace

std::string PgnGame::tag(const std::string& key) const {
  for (const auto& [k, v] : tags)
    if (k == key) return v;
  return {};
}

std::optional<Move> move_from_san(const Position& p, std::string_view san) {
  std::string s(san);
  // Strip check/mate/annotation suffixes.
  while (!s.empty() && (s.back() == '+' || s.back() == '#' || s.back() == '!' ||
                        s.back() == '?'))
    s.pop_back();
  if (s.empty()) return std::nullopt;

  const auto legal = legal_moves(p);
  const int home_rank = p.side_to_move() == Color::white ? 0 : 7;

  if (s == "O-O" || s == "0-0") {
    const Move m{Square(4, home_rank), Square(6, home_rank), std::nullopt};
    const auto king = p.piece_at(m.from);
    if (king && king->kind == PieceKind::king &&
        std::find(legal.begin(), legal.end(), m) != legal.end())
      return m;
    return std::nullopt;
  }
  if (s == "O-O-O" || s == "0-0-0") {
    const Move m{Square(4, home_rank), Square(2, home_rank), std::nullopt};
    const auto king = p.piece_at(m.from);
    if (king && king->kind == PieceKind::king &&
        std::find(legal.begin(), legal.end(), m) != legal.end())
      return m;
    return std::nullopt;
  }

  std::optional<PieceKind> promo;
  if (s.size() >= 2) {
    const char last = s.back();
    const char prev = s[s.size() - 2];
    if (const auto pk = san_piece(last); pk && pk != PieceKind::king) {
      promo = pk;
      s.pop_back();
      if (!s.empty() && s.back() == '=') s.pop_back();
      (void)prev;
    }
  }

  PieceKind kind = PieceKind::pawn;
  std::size_t i = 0;
  if (!s.empty()) {
    if (const auto pk = san_piece(s[0])) {
      kind = *pk;
      i = 1;
    }
  }

  // Remaining: [disambig file][disambig rank][x]<target file><target rank>
  std::string body = s.substr(i);
  body.erase(std::remove(body.begin(), body.end(), 'x'), body.end());
  if (body.size() < 2) return std::nullopt;
  const auto target = Square::parse(body.substr(body.size() - 2));
  if (!target) return std::nullopt;
  std::optional<int> dis_file, dis_rank;
  for (char c : body.substr(0, body.size() - 2)) {
    if (c >= 'a' && c <= 'h') dis_file = c - 'a';
    else if (c >= '1' && c <= '8') dis_rank = c - '1';
    else return std::nullopt;
  }

  std::optional<Move> found;
  for (const Move& m : legal) {
    const auto piece = p.piece_at(m.from);
    if (!piece || piece->kind != kind) continue;
    if (m.to != *target) continue;
    if (m.promotion != promo) continue;
    if (dis_file && m.from.file() != *dis_file) continue;
    if (dis_rank && m.from.rank() != *dis_rank) continue;
    if (kind == PieceKind::king && std::abs(m.to.file() - m.from.file()) == 2)
      continue;  // castling only via O-O spelling
    if (found) return std::nullopt;  // ambiguous
    found = m;
  }
  return found;
}

std::string to_san(const Position& p, const Move& m) {
  const auto piece = p.piece_at(m.from);
  if (!piece) throw std::invalid_argument("to_san: no piece on " + m.from.name());

  std::string out;
  if (piece->kind == PieceKind::king && std::abs(m.to.file() - m.from.file()) == 2) {
    out = m.to.file() == 6 ? "O-O" : "O-O-O";
  } else {
    const bool is_capture =
        p.piece_at(m.to).has_value() ||
        (piece->kind == PieceKind::pawn && p.en_passant() && m.to == *p.en_passant());
    if (piece->kind == PieceKind::pawn) {
      if (is_capture) out += static_cast<char>('a' + m.from.file());
    } else {
      static const char letter[6] = {' ', 'N', 'B', 'R', 'Q', 'K'};
      out.push_back(letter[static_cast<int>(piece->kind)]);
      // Disambiguate against other same-kind pieces reaching the target.
      bool need_file = false, need_rank = false, ambiguous = false;
      for (const Move& other : legal_moves(p)) {
        if (other.from == m.from || other.to != m.to) continue;
        const auto op = p.piece_at(other.from);
        if (!op || op->kind != piece->kind) continue;
        ambiguous = true;
        if (other.from.file() == m.from.file()) need_rank = true;
        else need_file = true;
      }
      if (ambiguous) {
        if (need_file || !need_rank) out.push_back(static_cast<char>('a' + m.from.file()));
        if (need_rank) out.push_back(static_cast<char>('1' + m.from.rank()));
      }
    }
    if (is_capture) out.push_back('x');
    out += m.to.name();
    if (m.promotion) {
      static const char letter[6] = {' ', 'N', 'B', 'R', 'Q', ' '};
      out.push_back('=');
      out.push_back(letter[static_cast<int>(*m.promotion)]);
    }
  }

  const Position q = apply_move_unchecked(p, m);
  if (in_check(q, q.side_to_move()))
    out.push_back(legal_moves(q).empty() ? '#' : '+');
  return out;
}

namespace {

class Tokenizer {
 public:
  explicit Tokenizer(const std::string& text) : text_(text) {}

  struct Token {
    enum Kind { tag, san, result, end } kind;
    std::string a, b;  // tag key/value, or token text in `a`
  };

  Token next() {
    skip_noise();
    if (pos_ >= text_.size()) return {Token::end, "", ""};
    if (text_[pos_] == '[') return read_tag();
    return read_word();
  }

 private:
  void skip_noise() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '{') {
        while (pos_ < text_.size() && text_[pos_] != '}') ++pos_;
        if (pos_ < text_.size()) ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '(') {
        int depth = 0;
        while (pos_ < text_.size()) {
          if (text_[pos_] == '(') ++depth;
          else if (text_[pos_] == ')' && --depth == 0) { ++pos_; break; }
          else if (text_[pos_] == '{') {
            while (pos_ < text_.size() && text_[pos_] != '}') ++pos_;
          }
          ++pos_;
        }
      } else if (c == '$') {
        ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        break;
      }
    }
  }

  Token read_tag() {
    ++pos_;  // '['
    std::string key, value;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != ']')
      key.push_back(text_[pos_++]);
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '"') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        value.push_back(text_[pos_++]);
      }
      if (pos_ < text_.size()) ++pos_;
    }
    while (pos_ < text_.size() && text_[pos_] != ']') ++pos_;
    if (pos_ < text_.size()) ++pos_;
    return {Token::tag, key, value};
  }

  Token read_word() {
    std::string word;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '{' && text_[pos_] != '(' && text_[pos_] != ';' &&
           text_[pos_] != '[')
      word.push_back(text_[pos_++]);
    if (is_result_token(word)) return {Token::result, word, ""};
    // Move numbers: "12." / "12..." — strip; a bare number is noise.
    std::size_t digits = 0;
    while (digits < word.size() && std::isdigit(static_cast<unsigned char>(word[digits])))
      ++digits;
    if (digits > 0) {
      std::size_t dots = digits;
      while (dots < word.size() && word[dots] == '.') ++dots;
      if (dots == word.size()) return next();
      word = word.substr(dots);
    }
    if (word.empty()) return next();
    return {Token::san, word, ""};
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<PgnGame> parse_pgn_games(const std::string& text) {
  std::vector<PgnGame> games;
  Tokenizer tok(text);

  PgnGame cur;
  bool in_game = false;
  bool movetext_seen = false;
  bool skipping = false;  // after a truncation, discard until game end

  const auto finish = [&]() {
    if (in_game) games.push_back(std::move(cur));
    cur = PgnGame{};
    in_game = false;
    movetext_seen = false;
    skipping = false;
  };

  for (;;) {
    const auto t = tok.next();
    if (t.kind == Tokenizer::Token::end) break;
    if (t.kind == Tokenizer::Token::tag) {
      if (movetext_seen) finish();  // tag block starts the next game
      if (!in_game) {
        in_game = true;
        cur.start = Position::initial();
      }
      cur.tags.emplace_back(t.a, t.b);
      if (t.a == "FEN") cur.start = Position::from_fen(t.b);
      continue;
    }
    if (!in_game) {
      in_game = true;
      cur.start = Position::initial();
    }
    if (t.kind == Tokenizer::Token::result) {
      finish();
      continue;
    }
    movetext_seen = true;
    if (skipping) continue;
    const Position& before = cur.positions.empty() ? cur.start : cur.positions.back();
    const auto move = move_from_san(before, t.a);
    if (!move) {
      cur.warning = "truncated at ply " + std::to_string(cur.moves.size() + 1) +
                    ": unresolvable SAN '" + t.a + "'";
      skipping = true;
      continue;
    }
    cur.moves.push_back(*move);
    cur.positions.push_back(apply_move_unchecked(before, *move));
  }
  finish();
  return games;
}

}  // namespace qkrd::chess
