"""Command-line tools: zbufc, zlink-monitor, mock-renderer, camsync."""
