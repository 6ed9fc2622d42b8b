#pragma once

#include "ailimit/error.hpp"
#include "ailimit/core_map.hpp"
#include "ailimit/symbols.hpp"
#include "ailimit/ai_limit.hpp"
#include "ailimit/parallel.hpp"
#include "ailimit/regions.hpp"
#include "ailimit/qr_update.hpp"
#include "ailimit/continuation.hpp"
#include "ailimit/scan.hpp"
#include "ailimit/io.hpp"
