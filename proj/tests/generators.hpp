#pragma once

#include "chabauty/corpus.hpp"

namespace chabauty {
namespace testgen = corpus;
}
