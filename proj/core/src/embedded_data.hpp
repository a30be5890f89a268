#pragma once

#include <string_view>

namespace payattr::embedded {

std::string_view emoticons();
std::string_view laughing();
std::string_view curse_words();
std::string_view lemma_exceptions();
std::string_view names_us();

}  // namespace payattr::embedded
