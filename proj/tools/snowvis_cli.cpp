// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "snowvis/cli.hpp"

int main(int argc, char** argv) { return snowvis::cli::run(argc, argv); }
