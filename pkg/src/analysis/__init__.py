# Transpilation and Run Reports
