#include "llmmom/prompt.hpp"

#include <fstream>
#include <sstream>

#include "llmmom/digest.hpp"
#include "llmmom/error.hpp"

namespace llmmom {

namespace detail {
extern const char kBasicTemplate[];
extern const char kAdvancedTemplate[];
}  // namespace detail

std::string_view to_string(PromptVariant v) { return v == PromptVariant::Basic ? "basic" : "advanced"; }

PromptVariant parse_prompt_variant(std::string_view text) {
  if (text == "basic" || text == "Basic") return PromptVariant::Basic;
  if (text == "advanced" || text == "Advanced") return PromptVariant::Advanced;
  throw PreconditionError("unknown prompt variant '" + std::string(text) + "'");
}

namespace {

// Offset of the start of the final non-empty line.
std::size_t last_line_start(std::string_view text) {
  auto end = text.size();
  while (end > 0 && text[end - 1] == '\n') --end;
  const auto nl = text.rfind('\n', end == 0 ? 0 : end - 1);
  return nl == std::string_view::npos ? 0 : nl + 1;
}

void check_template(const std::string& text, const char* name) {
  const auto tail = std::string_view(text).substr(last_line_start(text));
  if (tail.rfind("**IMPORTANT**", 0) != 0) {
    throw PreconditionError(std::string(name) + " template must end with the **IMPORTANT** output line");
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError(p.string(), 0, "cannot open template");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PromptTemplates::PromptTemplates(std::string basic, std::string advanced)
    : basic_(std::move(basic)), advanced_(std::move(advanced)) {
  check_template(basic_, "basic");
  check_template(advanced_, "advanced");
  basic_hash_ = sha256_hex(basic_);
  advanced_hash_ = sha256_hex(advanced_);
}

const PromptTemplates& PromptTemplates::builtin() {
  static const PromptTemplates t(detail::kBasicTemplate, detail::kAdvancedTemplate);
  return t;
}

PromptTemplates PromptTemplates::from_directory(const std::filesystem::path& dir) {
  return PromptTemplates(read_file(dir / "basic.txt"), read_file(dir / "advanced.txt"));
}

std::string relative_age(Timestamp published_at, Timestamp as_of) {
  const long long minutes = minutes_between(published_at, as_of);
  if (minutes < 0) {
    throw PreconditionError("news item at " + published_at.str() + " is after the request time " + as_of.str());
  }
  const long long hours = minutes / 60;
  if (hours < 48) return std::to_string(hours) + " hours ago";
  return std::to_string(hours / 24) + " days ago";
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tmpl.size() + 64);
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      return out;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw PreconditionError("unterminated template placeholder");
    const auto name = tmpl.substr(open + 2, close - open - 2);
    auto it = values.find(name);
    if (it == values.end()) throw PreconditionError("unknown template placeholder '" + std::string(name) + "'");
    out.append(tmpl.substr(pos, open - pos));
    out.append(it->second);
    pos = close + 2;
  }
}

std::string render_news_block(const NewsWindow& window, Timestamp as_of) {
  std::string out;
  if (window.items.empty()) {
    out.append(kEmptyNewsSentinel);
    out.append("\n\n");
    return out;
  }
  for (const auto& item : window.items) {
    out += '[';
    out += relative_age(item.published_at, as_of);
    out += "]\n";
    out += item.title;
    out += '\n';
    out += item.summary;
    out += "\n\n";
  }
  return out;
}

RenderedPrompt render(const PromptSpec& spec, Date target_close_date, const PromptTemplates& templates) {
  if (spec.horizon_days != 5 && spec.horizon_days != 21) {
    throw PreconditionError("prompt horizon must be 5 (weekly) or 21 (monthly) business days");
  }
  const std::map<std::string, std::string, std::less<>> values{
      {"ticker", spec.ticker},
      {"as_of", spec.as_of.str() + " (NYSE time)"},
      {"as_of_date", spec.as_of.date().iso()},
      {"lookback_days", std::to_string(spec.lookback_days)},
      {"horizon_days", std::to_string(spec.horizon_days)},
      {"target_date", target_close_date.iso()},
      {"rebalance_word", spec.horizon_days == 5 ? "week" : "month"},
  };
  const std::string filled = substitute(templates.text(spec.variant), values);

  // News goes right before the output instruction, separated by one blank line.
  const auto split = last_line_start(filled);
  std::string head = filled.substr(0, split);
  std::string block = render_news_block(spec.window, spec.as_of);
  if (head.size() < 2 || head.compare(head.size() - 2, 2, "\n\n") != 0) block.insert(0, "\n");

  RenderedPrompt out;
  out.text = std::move(head);
  out.text += block;
  out.text.append(filled, split, std::string::npos);
  out.template_hash = templates.hash(spec.variant);
  out.content_hash = sha256_hex(out.text);
  out.empty_window = spec.window.items.empty();
  return out;
}

}  // namespace llmmom
