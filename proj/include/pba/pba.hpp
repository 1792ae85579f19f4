#ifndef PBA_PBA_HPP
#define PBA_PBA_HPP

#include "pba/corpus.hpp"
#include "pba/evaluation.hpp"
#include "pba/index.hpp"
#include "pba/lattice.hpp"
#include "pba/probscore.hpp"
#include "pba/report.hpp"
#include "pba/strategies.hpp"

#endif  // PBA_PBA_HPP
