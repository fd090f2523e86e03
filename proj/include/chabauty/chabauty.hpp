#pragma once

#include "chabauty/acceptance.hpp"
#include "chabauty/chabauty_lab.hpp"
#include "chabauty/classify.hpp"
#include "chabauty/concrete.hpp"
#include "chabauty/corpus.hpp"
#include "chabauty/duality.hpp"
#include "chabauty/errors.hpp"
#include "chabauty/grammar.hpp"
#include "chabauty/lattice.hpp"
#include "chabauty/nets.hpp"
#include "chabauty/parallel.hpp"
#include "chabauty/rational.hpp"
#include "chabauty/structure.hpp"
#include "chabauty/verdict.hpp"
