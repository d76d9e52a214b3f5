#ifndef QVERT_QVERT_HPP
#define QVERT_QVERT_HPP

/// Umbrella header for the qvert library.

#include "qvert/arith.hpp"
#include "qvert/bareiss.hpp"
#include "qvert/enumerate.hpp"
#include "qvert/generator.hpp"
#include "qvert/oracle.hpp"
#include "qvert/problem.hpp"
#include "qvert/tableau.hpp"
#include "qvert/trie.hpp"
#include "qvert/typevec.hpp"
#include "qvert/vertex.hpp"

#endif  // QVERT_QVERT_HPP
