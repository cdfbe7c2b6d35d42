#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "llmmom/calendar.hpp"
#include "llmmom/news_store.hpp"

namespace llmmom {

enum class PromptVariant { Basic, Advanced };

std::string_view to_string(PromptVariant v);
PromptVariant parse_prompt_variant(std::string_view text);

/// Requests go out at 15:55 exchange time on the rebalance date, ten minutes
/// after the news cutoff.
inline constexpr int kRequestHour = 15;
inline constexpr int kRequestMinute = 55;

struct PromptSpec {
  PromptVariant variant = PromptVariant::Basic;
  std::string ticker;
  Timestamp as_of;
  int lookback_days = 1;
  int horizon_days = 21;  // 5 (weekly) or 21 (monthly)
  NewsWindow window;
};

struct RenderedPrompt {
  std::string text;
  std::string template_hash;
  std::string content_hash;
  bool empty_window = false;
};

/// The two template texts. Placeholders use {{name}} syntax; the last line
/// of each template is the output instruction and always ends the prompt.
class PromptTemplates {
 public:
  /// Templates compiled into the binary from templates/*.txt.
  static const PromptTemplates& builtin();
  /// Loads basic.txt and advanced.txt from `dir`.
  static PromptTemplates from_directory(const std::filesystem::path& dir);

  PromptTemplates(std::string basic, std::string advanced);

  const std::string& text(PromptVariant v) const { return v == PromptVariant::Basic ? basic_ : advanced_; }
  const std::string& hash(PromptVariant v) const { return v == PromptVariant::Basic ? basic_hash_ : advanced_hash_; }

 private:
  std::string basic_, advanced_;
  std::string basic_hash_, advanced_hash_;
};

inline constexpr std::string_view kEmptyNewsSentinel = "No news items.";

/// "<H> hours ago" below 48 hours, "<D> days ago" otherwise (both floored).
std::string relative_age(Timestamp published_at, Timestamp as_of);

/// Substitutes {{name}} placeholders. Throws PreconditionError on an unknown
/// or unterminated placeholder.
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

/// The news block inserted before the output instruction line.
std::string render_news_block(const NewsWindow& window, Timestamp as_of);

RenderedPrompt render(const PromptSpec& spec, Date target_close_date,
                      const PromptTemplates& templates = PromptTemplates::builtin());

}  // namespace llmmom
