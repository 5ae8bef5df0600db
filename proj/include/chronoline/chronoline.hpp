#pragma once

#include "embedding_store.hpp"
#include "error.hpp"
#include "io.hpp"
#include "kpca.hpp"
#include "metrics.hpp"
#include "probing.hpp"
#include "synthetic.hpp"
#include "timeline.hpp"
