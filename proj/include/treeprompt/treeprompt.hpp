// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "treeprompt/adjustment.hpp"
#include "treeprompt/bench.hpp"
#include "treeprompt/compress.hpp"
#include "treeprompt/error.hpp"
#include "treeprompt/evalkit.hpp"
#include "treeprompt/global_tree.hpp"
#include "treeprompt/ngram.hpp"
#include "treeprompt/parse_ingest.hpp"
#include "treeprompt/pipeline.hpp"
#include "treeprompt/pruner.hpp"
#include "treeprompt/remote.hpp"
#include "treeprompt/report.hpp"
#include "treeprompt/scoring.hpp"
#include "treeprompt/segmenter.hpp"
#include "treeprompt/sidecar.hpp"
#include "treeprompt/tokenize.hpp"
#include "treeprompt/utf8.hpp"
