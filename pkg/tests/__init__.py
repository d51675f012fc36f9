# GRL Test Suite
