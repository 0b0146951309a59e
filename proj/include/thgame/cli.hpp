#pragma once

#include <ostream>
#include <string_view>
#include <vector>

#include "thgame/game_engine.hpp"

namespace thgame {

/// "a..b", "a,b,c" or a mix such as "2..4,8". Throws ConfigError on bad syntax or an empty range.
std::vector<int> parse_int_list(std::string_view text);

/// Comma separated kinds or "all".
std::vector<GameKind> parse_kind_list(std::string_view text);

/// Entry point of the thgame tool. Returns 0 on success, 2 on usage/config errors, 1 otherwise.
int cli_dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace thgame
